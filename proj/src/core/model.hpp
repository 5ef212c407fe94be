#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace survkit {

// Risk heads squash to [0,1] through a sigmoid; Logits2 heads emit two raw
// class scores for the censored cross-entropy loss.
enum class HeadOutput : std::uint32_t { Risk = 0, Logits2 = 1 };

// Small fully-connected net, ReLU hidden layers. Weights are row-major
// (out x in) per layer.
struct MlpHead {
  std::vector<int> layer_sizes;  // input, hidden..., output
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  HeadOutput output = HeadOutput::Risk;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t n_layers() const { return weights.size(); }

  bool operator==(const MlpHead&) const = default;
};

struct FusionWeights {
  double w_nv = 0.5;  // weight on the head over features_a
  double w_v = 0.5;   // weight on the head over features_b

  bool operator==(const FusionWeights&) const = default;
};

struct RiskModel {
  MlpHead head_a;
  MlpHead head_b;
  FusionWeights fusion;

  HeadOutput output_kind() const { return head_a.output; }
  // Fused outputs per sample: 1 for Risk heads, 2 for Logits2 heads.
  std::size_t outputs_per_sample() const { return output_kind() == HeadOutput::Risk ? 1 : 2; }

  bool operator==(const RiskModel&) const = default;
};

// He-uniform weights, zero biases, reproducible per seed. hidden_* excludes
// the input and output layers; the output layer is 1 unit (Risk) or 2
// (Logits2). Fusion weights must be nonnegative and sum to 1.
RiskModel init_model(std::uint64_t seed, int dim_a, int dim_b, const std::vector<int>& hidden_a,
                     const std::vector<int>& hidden_b, FusionWeights fusion,
                     HeadOutput output = HeadOutput::Risk);

struct ForwardResult {
  double fused = 0.0;   // w_nv * out_a + w_v * out_b (Risk heads)
  double out_a = 0.0;   // R_nv
  double out_b = 0.0;   // R_v
};

// Single-record risk forward pass (Risk heads only).
ForwardResult forward(const RiskModel& model, const SurvivalRecord& record);

// Fused per-sample outputs for a whole dataset, row-major
// outputs_per_sample() wide.
std::vector<double> forward_batch(const RiskModel& model, const Dataset& ds,
                                  std::span<const std::size_t> indices);
std::vector<double> forward_batch(const RiskModel& model, const Dataset& ds);

// Risk scores used for ranking: the fused sigmoid output, or the early-bin
// probability for Logits2 models.
std::vector<double> predict_risks(const RiskModel& model, const Dataset& ds);

// Cached activations for one batch, consumed by backward().
struct ForwardCache {
  // per head: activations[layer][sample*width + unit]; layer 0 is the input
  std::vector<std::vector<double>> acts_a, acts_b;
  std::size_t batch = 0;
};

std::vector<double> forward_batch(const RiskModel& model, const Dataset& ds,
                                  std::span<const std::size_t> indices, ForwardCache& cache);

struct HeadGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

struct ParameterGradients {
  HeadGradients head_a, head_b;
};

// Backpropagates d(loss)/d(fused output), laid out like forward_batch's
// return value, down to every weight and bias. Fusion weights are fixed
// hyperparameters: the chain rule only routes w_nv / w_v through them.
ParameterGradients backward(const RiskModel& model, const ForwardCache& cache,
                            std::span<const double> upstream_grad);

// Versioned little-endian checkpoint; load rejects any layout mismatch.
void save_checkpoint(const RiskModel& model, const std::string& path);
RiskModel load_checkpoint(const std::string& path);

}  // namespace survkit
