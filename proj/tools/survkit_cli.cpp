// Experiment runner over the survkit C API. Every subcommand reads a flat
// key = value config, writes result files under --out and prints nothing on
// success; diagnostics go to stderr. Exit codes: 0 ok, 1 usage/config
// error, 2 runtime/data error.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "survkit/survkit.h"

namespace {

struct ConfigDeleter {
  void operator()(svk_config* c) const { svk_config_free(c); }
};
using ConfigPtr = std::unique_ptr<svk_config, ConfigDeleter>;

int fail(svk_status status) {
  std::fprintf(stderr, "survkit: %s\n", svk_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("survkit ") + svk_version() + " survival ranking experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::string checkpoint, checkpoint_2, dataset_csv;
  long long seed_data = -1, seed_model = -1, seed_sampler = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file")->required();
    cmd->add_option("--out", out_dir, "output directory (default: out)");
    cmd->add_option("--seed-data", seed_data, "override seed.data");
    cmd->add_option("--seed-model", seed_model, "override seed.model");
    cmd->add_option("--seed-sampler", seed_sampler, "override seed.sampler");
  };

  CLI::App* c_generate = app.add_subcommand("generate", "write a synthetic dataset CSV + manifest");
  CLI::App* c_train = app.add_subcommand("train", "train a model; writes checkpoint + report");
  CLI::App* c_eval = app.add_subcommand("eval", "evaluate a checkpoint (CI, AUC at horizon)");
  CLI::App* c_sweep_tau = app.add_subcommand("sweep-tau", "temperature sweep over seeds");
  CLI::App* c_sweep_fusion = app.add_subcommand("sweep-fusion", "fusion-weight sweep per loss");
  CLI::App* c_stability = app.add_subcommand("stability", "per-batch loss stability, wci vs bci");
  CLI::App* c_compare = app.add_subcommand("compare", "McNemar test between two checkpoints");

  for (CLI::App* cmd : {c_generate, c_train, c_eval, c_sweep_tau, c_sweep_fusion, c_stability, c_compare})
    add_common(cmd);

  c_eval->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  c_eval->add_option("--dataset", dataset_csv, "explicit dataset CSV (default: config test split)");
  c_compare->add_option("--checkpoint-1", checkpoint, "first model checkpoint")->required();
  c_compare->add_option("--checkpoint-2", checkpoint_2, "second model checkpoint")->required();
  c_compare->add_option("--dataset", dataset_csv, "explicit dataset CSV (default: config test split)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  svk_config* raw = nullptr;
  if (svk_status s = svk_config_read(config_path.c_str(), &raw); s != SVK_OK) return fail(s);
  ConfigPtr cfg(raw);

  auto override_seed = [&](const char* key, long long value) {
    return value < 0 ? SVK_OK : svk_config_set(cfg.get(), key, std::to_string(value).c_str());
  };
  if (svk_status s = override_seed("seed.data", seed_data); s != SVK_OK) return fail(s);
  if (svk_status s = override_seed("seed.model", seed_model); s != SVK_OK) return fail(s);
  if (svk_status s = override_seed("seed.sampler", seed_sampler); s != SVK_OK) return fail(s);

  svk_status status = SVK_OK;
  if (*c_generate) {
    status = svk_cmd_generate(cfg.get(), out_dir.c_str());
  } else if (*c_train) {
    status = svk_cmd_train(cfg.get(), out_dir.c_str());
  } else if (*c_eval) {
    status = svk_cmd_eval(cfg.get(), checkpoint.c_str(),
                          dataset_csv.empty() ? nullptr : dataset_csv.c_str(), out_dir.c_str());
  } else if (*c_sweep_tau) {
    status = svk_cmd_sweep_tau(cfg.get(), out_dir.c_str());
  } else if (*c_sweep_fusion) {
    status = svk_cmd_sweep_fusion(cfg.get(), out_dir.c_str());
  } else if (*c_stability) {
    status = svk_cmd_stability(cfg.get(), out_dir.c_str());
  } else if (*c_compare) {
    status = svk_cmd_compare(cfg.get(), checkpoint.c_str(), checkpoint_2.c_str(),
                             dataset_csv.empty() ? nullptr : dataset_csv.c_str(), out_dir.c_str());
  }
  return status == SVK_OK ? 0 : fail(status);
}
