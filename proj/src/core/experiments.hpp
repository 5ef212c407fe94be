#pragma once

#include <string>
#include <vector>

#include "core/kvconfig.hpp"
#include "core/losses.hpp"
#include "core/model.hpp"
#include "core/synth.hpp"
#include "core/trainer.hpp"

namespace survkit {

// Typed view over the flat config. Unknown keys are rejected so typos fail
// loudly instead of silently falling back to defaults.
struct ExperimentConfig {
  std::string source = "synthetic";  // synthetic | csv
  std::string csv_path;
  SynthConfig synth;

  std::uint64_t seed_data = 1;
  std::uint64_t seed_model = 2;
  std::uint64_t seed_sampler = 3;

  double f_train = 0.67;
  double f_val = 0.12;
  double f_test = 0.21;

  std::vector<int> hidden_a = {32, 16};
  std::vector<int> hidden_b = {16, 8};

  LossId loss = LossId::Wci;
  double tau = 0.1;
  double cut = 36.0;
  bool bci_logsigmoid = false;
  FusionWeights fusion{0.5, 0.5};

  OptimConfig optim;
  SamplerKind sampler_kind = SamplerKind::Uniform;
  int skew_min = 1;
  int skew_max = 16;

  double horizon = 36.0;
  std::string scorer = "model";  // model | oracle (synthetic source only)

  std::vector<double> sweep_taus = {10.0, 1.0, 0.1, 0.05, 0.02};
  int sweep_seeds = 5;
  std::vector<FusionWeights> fusion_grid;   // default 0.1:0.9 .. 0.9:0.1
  std::vector<LossId> sweep_losses;         // default all six

  int stability_batches = 200;
  int stability_seeds = 10;
  double stability_tau = 1.0;  // unit temperature isolates the averaging scheme

  bool compare_exact = false;

  KvConfig raw;
  std::string hash;

  std::string csv_comment() const;  // "# survkit <version> config=<hash>"
  LossEvalConfig loss_eval_config() const;
};

ExperimentConfig parse_experiment_config(const KvConfig& kv);

// Dataset per the config's data source; `seed_data` overrides the synthetic
// seed so sweep repetitions can redraw data.
Dataset load_dataset(const ExperimentConfig& ec, std::uint64_t seed_data);

struct TrainedRun {
  SplitResult splits;
  RiskModel model;
  TrainResult outcome;
};

TrainedRun run_training(const ExperimentConfig& ec, LossId loss, double tau, FusionWeights fusion,
                        std::uint64_t seed_data, std::uint64_t seed_model, std::uint64_t seed_sampler);

// CLI command bodies. Results go to files under out_dir; nothing is printed.
void cmd_generate(const ExperimentConfig& ec, const std::string& out_dir);
void cmd_train(const ExperimentConfig& ec, const std::string& out_dir);
void cmd_eval(const ExperimentConfig& ec, const std::string& checkpoint_path,
              const std::string& dataset_csv, const std::string& out_dir);
void cmd_sweep_tau(const ExperimentConfig& ec, const std::string& out_dir);
void cmd_sweep_fusion(const ExperimentConfig& ec, const std::string& out_dir);
void cmd_stability(const ExperimentConfig& ec, const std::string& out_dir);
void cmd_compare(const ExperimentConfig& ec, const std::string& checkpoint_1,
                 const std::string& checkpoint_2, const std::string& dataset_csv,
                 const std::string& out_dir);

}  // namespace survkit
