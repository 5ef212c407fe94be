#include "core/experiments.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/pairing.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"
#include "core/version.hpp"

namespace survkit {

namespace {

const std::set<std::string> kKnownKeys = {
    "data.source",       "data.csv",           "data.name",
    "synth.n",           "synth.dim_a",        "synth.dim_b",
    "synth.beta_a",      "synth.beta_b",       "synth.baseline_rate",
    "synth.censor_rate", "synth.time_scale",
    "seed.data",         "seed.model",         "seed.sampler",
    "split.train",       "split.val",          "split.test",
    "model.hidden_a",    "model.hidden_b",
    "loss.id",           "loss.tau",           "loss.cut",          "loss.bci_logsigmoid",
    "fusion.w_nv",       "fusion.w_v",
    "optim.lr_init",     "optim.lr_peak",      "optim.warmup_epochs",
    "optim.epochs",      "optim.momentum",     "optim.weight_decay", "optim.batch_size",
    "sampler.kind",      "sampler.skew_min",   "sampler.skew_max",
    "eval.horizon",      "eval.scorer",
    "sweep.taus",        "sweep.seeds",        "sweep.fusion_grid", "sweep.losses",
    "stability.batches", "stability.seeds",    "stability.tau",
    "compare.exact",
};

SamplerKind parse_sampler_kind(const std::string& s) {
  if (s == "uniform") return SamplerKind::Uniform;
  if (s == "event_balanced") return SamplerKind::EventBalanced;
  if (s == "skewed") return SamplerKind::Skewed;
  throw ConfigError("unknown sampler.kind '" + s + "' (want uniform|event_balanced|skewed)");
}

const char* sampler_kind_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::EventBalanced: return "event_balanced";
    case SamplerKind::Skewed: return "skewed";
  }
  return "?";
}

std::vector<FusionWeights> parse_fusion_grid(const std::string& text) {
  std::vector<FusionWeights> grid;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    const auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw ConfigError("sweep.fusion_grid: expected w_nv:w_v pairs, got '" + std::string(item) + "'");
    const auto nv = parse_double(trim(item.substr(0, colon)));
    const auto v = parse_double(trim(item.substr(colon + 1)));
    if (!nv || !v) throw ConfigError("sweep.fusion_grid: bad pair '" + std::string(item) + "'");
    grid.push_back(FusionWeights{*nv, *v});
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return grid;
}

void validate_fusion(const FusionWeights& w, const char* who) {
  if (w.w_nv < 0.0 || w.w_v < 0.0 || std::abs(w.w_nv + w.w_v - 1.0) > 1e-9)
    throw ConfigError(std::string(who) + ": fusion weights must be nonnegative and sum to 1");
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw DataError("cannot write '" + tmp + "'");
    f << content;
    if (!f) throw DataError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string out_path(const std::string& out_dir, const std::string& file) {
  std::filesystem::create_directories(out_dir);
  return (std::filesystem::path(out_dir) / file).string();
}

HeadOutput head_output_for(LossId loss) {
  return loss == LossId::Cce ? HeadOutput::Logits2 : HeadOutput::Risk;
}

struct EvalRow {
  std::string dataset;
  std::string scorer;
  std::size_t n = 0;
  std::size_t events = 0;
  double ci = 0.0;
  double horizon = 0.0;
  double auc = 0.0;
};

EvalRow evaluate_risks(const Dataset& ds, const std::vector<double>& risks, double horizon,
                       const std::string& scorer) {
  EvalRow row;
  row.dataset = ds.name;
  row.scorer = scorer;
  row.n = ds.size();
  row.events = ds.n_events();
  row.ci = concordance_index(ds, risks);
  row.horizon = horizon;
  row.auc = time_dependent_auc(ds, risks, horizon);
  return row;
}

}  // namespace

std::string ExperimentConfig::csv_comment() const {
  return std::string("# survkit ") + kVersion + " config=" + hash;
}

LossEvalConfig ExperimentConfig::loss_eval_config() const {
  LossEvalConfig cfg;
  cfg.tau = tau;
  cfg.cut = cut;
  cfg.bci_surrogate = bci_logsigmoid ? BciSurrogate::LogSigmoid : BciSurrogate::Exponential;
  return cfg;
}

ExperimentConfig parse_experiment_config(const KvConfig& kv) {
  for (const auto& [key, value] : kv.entries()) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  ExperimentConfig ec;
  ec.raw = kv;
  ec.hash = kv.hash_hex();

  ec.source = kv.get_string("data.source", ec.source);
  if (ec.source != "synthetic" && ec.source != "csv")
    throw ConfigError("data.source must be synthetic or csv");
  ec.csv_path = kv.get_string("data.csv", "");
  if (ec.source == "csv" && ec.csv_path.empty())
    throw ConfigError("data.source = csv requires data.csv");

  ec.synth.n = static_cast<std::size_t>(kv.get_int("synth.n", 2000));
  ec.synth.dim_a = static_cast<std::size_t>(kv.get_int("synth.dim_a", 8));
  ec.synth.dim_b = static_cast<std::size_t>(kv.get_int("synth.dim_b", 4));
  ec.synth.beta_a = kv.get_double_list("synth.beta_a", {});
  ec.synth.beta_b = kv.get_double_list("synth.beta_b", {});
  ec.synth.baseline_rate = kv.get_double("synth.baseline_rate", 0.02);
  ec.synth.censor_rate = kv.get_double("synth.censor_rate", 0.01);
  ec.synth.time_scale = kv.get_double("synth.time_scale", 1.0);

  ec.seed_data = static_cast<std::uint64_t>(kv.get_int("seed.data", 1));
  ec.seed_model = static_cast<std::uint64_t>(kv.get_int("seed.model", 2));
  ec.seed_sampler = static_cast<std::uint64_t>(kv.get_int("seed.sampler", 3));
  ec.synth.seed = ec.seed_data;

  ec.f_train = kv.get_double("split.train", ec.f_train);
  ec.f_val = kv.get_double("split.val", ec.f_val);
  ec.f_test = kv.get_double("split.test", ec.f_test);

  // "none" requests plain affine-plus-sigmoid heads.
  for (auto [key, out] : {std::pair<const char*, std::vector<int>*>{"model.hidden_a", &ec.hidden_a},
                          std::pair<const char*, std::vector<int>*>{"model.hidden_b", &ec.hidden_b}}) {
    if (kv.get_string(key, "") == "none")
      out->clear();
    else
      *out = kv.get_int_list(key, *out);
  }

  ec.loss = parse_loss_id(kv.get_string("loss.id", "wci"));
  ec.tau = kv.get_double("loss.tau", 0.1);
  if (!(ec.tau > 0.0)) throw ConfigError("loss.tau must be > 0");
  ec.cut = kv.get_double("loss.cut", 36.0);
  if (!(ec.cut > 0.0)) throw ConfigError("loss.cut must be > 0");
  ec.bci_logsigmoid = kv.get_bool("loss.bci_logsigmoid", false);

  ec.fusion.w_nv = kv.get_double("fusion.w_nv", 0.5);
  ec.fusion.w_v = kv.get_double("fusion.w_v", 0.5);
  validate_fusion(ec.fusion, "fusion");

  ec.optim.lr_init = kv.get_double("optim.lr_init", ec.optim.lr_init);
  ec.optim.lr_peak = kv.get_double("optim.lr_peak", ec.optim.lr_peak);
  ec.optim.warmup_epochs = static_cast<int>(kv.get_int("optim.warmup_epochs", ec.optim.warmup_epochs));
  ec.optim.epochs = static_cast<int>(kv.get_int("optim.epochs", ec.optim.epochs));
  ec.optim.momentum = kv.get_double("optim.momentum", ec.optim.momentum);
  ec.optim.weight_decay = kv.get_double("optim.weight_decay", ec.optim.weight_decay);
  ec.optim.batch_size = static_cast<int>(kv.get_int("optim.batch_size", ec.optim.batch_size));
  validate(ec.optim);

  ec.sampler_kind = parse_sampler_kind(kv.get_string("sampler.kind", "uniform"));
  ec.skew_min = static_cast<int>(kv.get_int("sampler.skew_min", ec.skew_min));
  ec.skew_max = static_cast<int>(kv.get_int("sampler.skew_max", ec.skew_max));
  if (ec.skew_min < 0 || ec.skew_max < ec.skew_min || ec.skew_max > ec.optim.batch_size)
    throw ConfigError("sampler.skew_min/skew_max must satisfy 0 <= min <= max <= batch_size");

  ec.horizon = kv.get_double("eval.horizon", 36.0);
  if (!(ec.horizon > 0.0)) throw ConfigError("eval.horizon must be > 0");
  ec.scorer = kv.get_string("eval.scorer", "model");
  if (ec.scorer != "model" && ec.scorer != "oracle")
    throw ConfigError("eval.scorer must be model or oracle");
  if (ec.scorer == "oracle" && ec.source != "synthetic")
    throw ConfigError("eval.scorer = oracle requires data.source = synthetic");

  ec.sweep_taus = kv.get_double_list("sweep.taus", ec.sweep_taus);
  for (double t : ec.sweep_taus)
    if (!(t > 0.0)) throw ConfigError("sweep.taus entries must be > 0");
  ec.sweep_seeds = static_cast<int>(kv.get_int("sweep.seeds", ec.sweep_seeds));
  if (ec.sweep_seeds < 1) throw ConfigError("sweep.seeds must be >= 1");

  const std::string grid_text =
      kv.get_string("sweep.fusion_grid", "0.1:0.9,0.3:0.7,0.5:0.5,0.7:0.3,0.9:0.1");
  ec.fusion_grid = parse_fusion_grid(grid_text);
  for (const auto& w : ec.fusion_grid) validate_fusion(w, "sweep.fusion_grid");

  const std::string losses_text = kv.get_string("sweep.losses", "ce,cox,bci,cce,wci_no_tau,wci");
  {
    std::string_view rest = losses_text;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      ec.sweep_losses.push_back(parse_loss_id(std::string(trim(rest.substr(0, comma)))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }

  ec.stability_batches = static_cast<int>(kv.get_int("stability.batches", ec.stability_batches));
  if (ec.stability_batches < 2) throw ConfigError("stability.batches must be >= 2");
  ec.stability_seeds = static_cast<int>(kv.get_int("stability.seeds", ec.stability_seeds));
  if (ec.stability_seeds < 1) throw ConfigError("stability.seeds must be >= 1");
  ec.stability_tau = kv.get_double("stability.tau", ec.stability_tau);
  if (!(ec.stability_tau > 0.0)) throw ConfigError("stability.tau must be > 0");

  ec.compare_exact = kv.get_bool("compare.exact", false);
  return ec;
}

Dataset load_dataset(const ExperimentConfig& ec, std::uint64_t seed_data) {
  if (ec.source == "csv") {
    Dataset ds = read_csv(ec.csv_path);
    if (!ec.raw.get_string("data.name", "").empty()) ds.name = ec.raw.get_string("data.name", "");
    return ds;
  }
  SynthConfig synth = ec.synth;
  synth.seed = seed_data;
  Dataset ds = generate_synthetic(synth);
  ds.name = ec.raw.get_string("data.name", "synthetic");
  return ds;
}

TrainedRun run_training(const ExperimentConfig& ec, LossId loss, double tau, FusionWeights fusion,
                        std::uint64_t seed_data, std::uint64_t seed_model, std::uint64_t seed_sampler) {
  TrainedRun run;
  const Dataset ds = load_dataset(ec, seed_data);
  run.splits = split(ds, ec.f_train, ec.f_val, ec.f_test, seed_data);

  run.model = init_model(seed_model, static_cast<int>(ds.dim_a), static_cast<int>(ds.dim_b), ec.hidden_a,
                         ec.hidden_b, fusion, head_output_for(loss));

  LossEvalConfig loss_cfg = ec.loss_eval_config();
  loss_cfg.tau = tau;

  SamplerPolicy sampler;
  sampler.kind = ec.sampler_kind;
  sampler.skew_min = ec.skew_min;
  sampler.skew_max = ec.skew_max;
  sampler.seed = seed_sampler;

  run.outcome = train(run.model, run.splits.train, run.splits.val, loss, loss_cfg, ec.optim, sampler);
  return run;
}

void cmd_generate(const ExperimentConfig& ec, const std::string& out_dir) {
  Dataset ds = load_dataset(ec, ec.seed_data);
  write_csv(ds, out_path(out_dir, "dataset.csv"), ec.csv_comment());

  std::ostringstream m;
  m << ec.csv_comment() << "\n";
  m << "version = " << kVersion << "\n";
  m << "config_hash = " << ec.hash << "\n";
  m << "file = dataset.csv\n";
  m << "n = " << ds.size() << "\n";
  m << "dim_a = " << ds.dim_a << "\n";
  m << "dim_b = " << ds.dim_b << "\n";
  m << "events = " << ds.n_events() << "\n";
  m << "censored_fraction = " << fmt_double(censored_fraction(ds)) << "\n";
  atomic_write(out_path(out_dir, "manifest.txt"), m.str());
}

void cmd_train(const ExperimentConfig& ec, const std::string& out_dir) {
  const TrainedRun run =
      run_training(ec, ec.loss, ec.loss == LossId::WciNoTau ? 1.0 : ec.tau, ec.fusion, ec.seed_data,
                   ec.seed_model, ec.seed_sampler);

  std::ostringstream csv;
  csv << ec.csv_comment() << "\n";
  csv << "epoch,lr_last,train_loss_mean,train_loss_std,batches,skipped,val_ci\n";
  for (const auto& e : run.outcome.report.epochs) {
    csv << e.epoch << "," << fmt_double(e.lr_last) << "," << fmt_double(e.train_loss_mean) << ","
        << fmt_double(e.train_loss_std) << "," << e.batches << "," << e.skipped << ","
        << fmt_double(e.val_ci) << "\n";
  }
  atomic_write(out_path(out_dir, "train_report.csv"), csv.str());

  save_checkpoint(run.model, out_path(out_dir, "checkpoint.bin"));
  if (run.outcome.best_model)
    save_checkpoint(*run.outcome.best_model, out_path(out_dir, "checkpoint_best.bin"));
}

void cmd_eval(const ExperimentConfig& ec, const std::string& checkpoint_path,
              const std::string& dataset_csv, const std::string& out_dir) {
  // Explicit dataset file: evaluate the whole file. Config source: evaluate
  // the held-out test split.
  Dataset eval_ds;
  std::uint64_t oracle_seed = ec.seed_data;
  if (!dataset_csv.empty()) {
    eval_ds = read_csv(dataset_csv);
  } else {
    const Dataset ds = load_dataset(ec, ec.seed_data);
    eval_ds = split(ds, ec.f_train, ec.f_val, ec.f_test, ec.seed_data).test;
  }

  std::vector<double> risks;
  if (ec.scorer == "oracle") {
    SynthConfig synth = ec.synth;
    synth.seed = oracle_seed;
    risks = oracle_risks(synth, eval_ds);
  } else {
    if (checkpoint_path.empty()) throw ConfigError("eval: checkpoint path required");
    const RiskModel model = load_checkpoint(checkpoint_path);
    risks = predict_risks(model, eval_ds);
  }

  const EvalRow row = evaluate_risks(eval_ds, risks, ec.horizon, ec.scorer);
  std::ostringstream csv;
  csv << ec.csv_comment() << "\n";
  csv << "dataset,scorer,n,events,ci,horizon,auc\n";
  csv << row.dataset << "," << row.scorer << "," << row.n << "," << row.events << ","
      << fmt_double(row.ci) << "," << fmt_double(row.horizon) << "," << fmt_double(row.auc) << "\n";
  atomic_write(out_path(out_dir, "metrics.csv"), csv.str());
}

void cmd_sweep_tau(const ExperimentConfig& ec, const std::string& out_dir) {
  std::ostringstream csv;
  csv << ec.csv_comment() << "\n";
  csv << "tau,seed,ci,auc\n";
  for (double tau : ec.sweep_taus) {
    for (int k = 0; k < ec.sweep_seeds; ++k) {
      const TrainedRun run = run_training(ec, LossId::Wci, tau, ec.fusion, ec.seed_data + k,
                                          ec.seed_model + k, ec.seed_sampler + k);
      const std::vector<double> risks = predict_risks(run.model, run.splits.test);
      const EvalRow row = evaluate_risks(run.splits.test, risks, ec.horizon, "model");
      csv << fmt_double(tau) << "," << k << "," << fmt_double(row.ci) << "," << fmt_double(row.auc)
          << "\n";
    }
  }
  atomic_write(out_path(out_dir, "sweep_tau.csv"), csv.str());
}

void cmd_sweep_fusion(const ExperimentConfig& ec, const std::string& out_dir) {
  std::ostringstream csv;
  csv << ec.csv_comment() << "\n";
  csv << "w_nv,w_v,loss,ci,auc\n";
  for (const auto& fusion : ec.fusion_grid) {
    for (LossId loss : ec.sweep_losses) {
      const TrainedRun run = run_training(ec, loss, loss == LossId::WciNoTau ? 1.0 : ec.tau, fusion,
                                          ec.seed_data, ec.seed_model, ec.seed_sampler);
      const std::vector<double> risks = predict_risks(run.model, run.splits.test);
      const EvalRow row = evaluate_risks(run.splits.test, risks, ec.horizon, "model");
      csv << fmt_double(fusion.w_nv) << "," << fmt_double(fusion.w_v) << "," << loss_id_name(loss)
          << "," << fmt_double(row.ci) << "," << fmt_double(row.auc) << "\n";
    }
  }
  atomic_write(out_path(out_dir, "sweep_fusion.csv"), csv.str());
}

void cmd_stability(const ExperimentConfig& ec, const std::string& out_dir) {
  const Dataset ds = load_dataset(ec, ec.seed_data);
  const std::vector<double> times = ds.times();
  const std::vector<int> events = ds.events();

  std::ostringstream csv;
  csv << ec.csv_comment() << "\n";
  csv << "sampler,loss,seed,batches,mean,std,cv\n";

  for (SamplerKind kind : {SamplerKind::Skewed, SamplerKind::Uniform}) {
    for (int k = 0; k < ec.stability_seeds; ++k) {
      // Fixed random scores stand in for a model; only batch composition
      // varies, which is exactly what the two averaging schemes disagree on.
      Rng risk_rng(ec.seed_model + static_cast<std::uint64_t>(k));
      std::vector<double> risks(ds.size());
      for (auto& r : risks) r = risk_rng.uniform01();

      SamplerPolicy policy;
      policy.kind = kind;
      policy.skew_min = ec.skew_min;
      policy.skew_max = ec.skew_max;
      policy.seed = ec.seed_sampler + static_cast<std::uint64_t>(k);

      std::vector<double> wci_losses, bci_losses;
      int epoch = 0;
      while (static_cast<int>(wci_losses.size()) < ec.stability_batches) {
        const auto batches = plan_epoch_batches(ds, policy, ec.optim.batch_size, epoch++);
        for (const auto& batch : batches) {
          if (static_cast<int>(wci_losses.size()) >= ec.stability_batches) break;
          std::vector<double> bt(batch.size()), br(batch.size());
          std::vector<int> be(batch.size());
          for (std::size_t i = 0; i < batch.size(); ++i) {
            bt[i] = times[batch[i]];
            be[i] = events[batch[i]];
            br[i] = risks[batch[i]];
          }
          const PairIndex pairs = build_pairs(bt, be, PairMode::Loss);
          if (pairs.n_events() == 0) continue;  // nothing comparable; skip for both losses
          wci_losses.push_back(wci_loss(pairs, br, WciConfig{ec.stability_tau}).value);
          bci_losses.push_back(
              bci_loss(pairs, br, ec.bci_logsigmoid ? BciSurrogate::LogSigmoid : BciSurrogate::Exponential)
                  .value);
        }
      }

      for (const auto& [name, series] :
           {std::pair<const char*, const std::vector<double>&>{"wci", wci_losses},
            std::pair<const char*, const std::vector<double>&>{"bci", bci_losses}}) {
        const StabilityReport rep = batch_stability(series);
        csv << sampler_kind_name(kind) << "," << name << "," << k << "," << series.size() << ","
            << fmt_double(rep.mean) << "," << fmt_double(rep.std_dev) << "," << fmt_double(rep.cv)
            << "\n";
      }
    }
  }
  atomic_write(out_path(out_dir, "stability.csv"), csv.str());
}

void cmd_compare(const ExperimentConfig& ec, const std::string& checkpoint_1,
                 const std::string& checkpoint_2, const std::string& dataset_csv,
                 const std::string& out_dir) {
  Dataset eval_ds;
  if (!dataset_csv.empty()) {
    eval_ds = read_csv(dataset_csv);
  } else {
    const Dataset ds = load_dataset(ec, ec.seed_data);
    eval_ds = split(ds, ec.f_train, ec.f_val, ec.f_test, ec.seed_data).test;
  }

  const RiskModel model_1 = load_checkpoint(checkpoint_1);
  const RiskModel model_2 = load_checkpoint(checkpoint_2);
  const std::vector<double> risks_1 = predict_risks(model_1, eval_ds);
  const std::vector<double> risks_2 = predict_risks(model_2, eval_ds);

  const McNemarResult res = mcnemar_ci(eval_ds, risks_1, risks_2, ec.compare_exact);
  const double ci_1 = concordance_index(eval_ds, risks_1);
  const double ci_2 = concordance_index(eval_ds, risks_2);
  const std::size_t pairs = build_pairs(eval_ds, PairMode::Metric).total_pairs();

  std::ostringstream csv;
  csv << ec.csv_comment() << "\n";
  csv << "pairs,b,c,statistic,p_value,ci_1,ci_2,exact\n";
  csv << pairs << "," << res.b << "," << res.c << "," << fmt_double(res.statistic) << ","
      << fmt_double(res.p_value) << "," << fmt_double(ci_1) << "," << fmt_double(ci_2) << ","
      << (ec.compare_exact ? "true" : "false") << "\n";
  atomic_write(out_path(out_dir, "compare.csv"), csv.str());
}

}  // namespace survkit
