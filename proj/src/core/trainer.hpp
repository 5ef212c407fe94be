#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "core/losses.hpp"
#include "core/model.hpp"
#include "core/types.hpp"

namespace survkit {

struct OptimConfig {
  double lr_init = 2e-4;
  double lr_peak = 1e-3;
  int warmup_epochs = 5;
  int epochs = 60;
  double momentum = 0.8;
  double weight_decay = 3e-5;
  int batch_size = 64;  // multiple of 8
};

void validate(const OptimConfig& cfg);

// Linear warmup lr_init -> lr_peak over warmup_epochs, then cosine decay
// from lr_peak to 0 over the remaining epochs. Continuous at the boundary.
double lr_at(const OptimConfig& cfg, int epoch, int step, int steps_per_epoch);

enum class SamplerKind { Uniform, EventBalanced, Skewed };

struct SamplerPolicy {
  SamplerKind kind = SamplerKind::Uniform;
  int skew_min = 1;   // Skewed: per-batch event count range, inclusive
  int skew_max = 16;
  std::uint64_t seed = 3;
};

// Batch index plans for one epoch. Uniform covers every record exactly once
// (last batch may be short); EventBalanced fixes the per-batch event count at
// the dataset's event rate; Skewed draws an event count uniformly from
// [skew_min, skew_max] per batch, sampling records with replacement.
std::vector<std::vector<std::size_t>> plan_epoch_batches(const Dataset& ds, const SamplerPolicy& policy,
                                                         int batch_size, int epoch);

struct EpochStats {
  int epoch = 0;
  double lr_last = 0.0;
  double train_loss_mean = 0.0;
  double train_loss_std = 0.0;
  int batches = 0;
  int skipped = 0;
  double val_ci = std::numeric_limits<double>::quiet_NaN();
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::vector<double> batch_losses;  // every evaluated batch, in order
  long skipped_batches = 0;
  int best_epoch = -1;  // epoch with the highest validation CI, -1 if none
  double best_val_ci = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  TrainReport report;
  std::optional<RiskModel> best_model;  // parameters at best_epoch, if any
};

// Mini-batch SGD with momentum and decoupled weight decay. Modifies `model`
// in place (final-epoch parameters). Batches whose loss has no usable pairs
// or labels are skipped and counted; an epoch with every batch skipped is a
// degenerate-sampler error. Deterministic for fixed seeds and data.
TrainResult train(RiskModel& model, const Dataset& train_ds, const Dataset& val_ds, LossId loss,
                  const LossEvalConfig& loss_cfg, const OptimConfig& optim, const SamplerPolicy& sampler);

// Event-stratified split with floor-then-distribute rounding. Fractions must
// sum to 1; a part with a positive fraction must receive at least one event.
struct SplitResult {
  Dataset train, val, test;
};
SplitResult split(const Dataset& ds, double f_train, double f_val, double f_test, std::uint64_t seed);

}  // namespace survkit
