#include "survkit/survkit.h"

#include <cstring>
#include <memory>
#include <span>
#include <string>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/metrics.hpp"
#include "core/pairing.hpp"
#include "core/version.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Runs the body, translating exceptions into status codes.
template <typename Fn>
svk_status guarded(Fn&& fn) {
  try {
    fn();
    return SVK_OK;
  } catch (const survkit::ConfigError& e) {
    set_error(e.what());
    return SVK_ERROR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return SVK_ERROR_RUNTIME;
  }
}

svk_status invalid_argument(const char* what) {
  set_error(std::string("invalid argument: ") + what);
  return SVK_ERROR_CONFIG;
}

}  // namespace

struct svk_config {
  survkit::KvConfig kv;
};

struct svk_dataset {
  survkit::Dataset ds;
};

struct svk_model {
  survkit::RiskModel model;
};

extern "C" {

const char* svk_version(void) { return survkit::kVersion; }

const char* svk_last_error(void) { return g_last_error.c_str(); }

svk_status svk_config_read(const char* path, svk_config** out) {
  if (!path || !out) return invalid_argument("svk_config_read(path, out)");
  return guarded([&] {
    auto cfg = std::make_unique<svk_config>();
    cfg->kv = survkit::KvConfig::from_file(path);
    survkit::parse_experiment_config(cfg->kv);  // fail fast on bad content
    *out = cfg.release();
  });
}

svk_status svk_config_parse(const char* text, svk_config** out) {
  if (!text || !out) return invalid_argument("svk_config_parse(text, out)");
  return guarded([&] {
    auto cfg = std::make_unique<svk_config>();
    cfg->kv = survkit::KvConfig::from_string(text);
    survkit::parse_experiment_config(cfg->kv);
    *out = cfg.release();
  });
}

svk_status svk_config_set(svk_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid_argument("svk_config_set(cfg, key, value)");
  return guarded([&] { cfg->kv.set(key, value); });
}

const char* svk_config_get(const svk_config* cfg, const char* key) {
  if (!cfg || !key) return nullptr;
  const std::string* v = cfg->kv.find(key);
  return v ? v->c_str() : nullptr;
}

void svk_config_free(svk_config* cfg) { delete cfg; }

svk_status svk_dataset_generate(const svk_config* cfg, svk_dataset** out) {
  if (!cfg || !out) return invalid_argument("svk_dataset_generate(cfg, out)");
  return guarded([&] {
    const auto ec = survkit::parse_experiment_config(cfg->kv);
    auto ds = std::make_unique<svk_dataset>();
    ds->ds = survkit::load_dataset(ec, ec.seed_data);
    *out = ds.release();
  });
}

svk_status svk_dataset_read_csv(const char* path, svk_dataset** out) {
  if (!path || !out) return invalid_argument("svk_dataset_read_csv(path, out)");
  return guarded([&] {
    auto ds = std::make_unique<svk_dataset>();
    ds->ds = survkit::read_csv(path);
    *out = ds.release();
  });
}

svk_status svk_dataset_write_csv(const svk_dataset* ds, const char* path) {
  if (!ds || !path) return invalid_argument("svk_dataset_write_csv(ds, path)");
  return guarded([&] { survkit::write_csv(ds->ds, path); });
}

long svk_dataset_size(const svk_dataset* ds) {
  return ds ? static_cast<long>(ds->ds.size()) : -1;
}

void svk_dataset_free(svk_dataset* ds) { delete ds; }

svk_status svk_model_read(const char* path, svk_model** out) {
  if (!path || !out) return invalid_argument("svk_model_read(path, out)");
  return guarded([&] {
    auto m = std::make_unique<svk_model>();
    m->model = survkit::load_checkpoint(path);
    *out = m.release();
  });
}

svk_status svk_model_write(const svk_model* model, const char* path) {
  if (!model || !path) return invalid_argument("svk_model_write(model, path)");
  return guarded([&] { survkit::save_checkpoint(model->model, path); });
}

svk_status svk_model_predict(const svk_model* model, const svk_dataset* ds, double* risks_out) {
  if (!model || !ds || !risks_out) return invalid_argument("svk_model_predict(model, ds, risks_out)");
  return guarded([&] {
    const auto risks = survkit::predict_risks(model->model, ds->ds);
    std::memcpy(risks_out, risks.data(), risks.size() * sizeof(double));
  });
}

void svk_model_free(svk_model* model) { delete model; }

svk_status svk_concordance_index(const svk_dataset* ds, const double* risks, size_t n,
                                 double* out_ci) {
  if (!ds || !risks || !out_ci) return invalid_argument("svk_concordance_index(ds, risks, out)");
  return guarded([&] {
    *out_ci = survkit::concordance_index(ds->ds, std::span<const double>(risks, n));
  });
}

svk_status svk_time_dependent_auc(const svk_dataset* ds, const double* risks, size_t n,
                                  double horizon, double* out_auc) {
  if (!ds || !risks || !out_auc) return invalid_argument("svk_time_dependent_auc(ds, risks, out)");
  return guarded([&] {
    *out_auc = survkit::time_dependent_auc(ds->ds, std::span<const double>(risks, n), horizon);
  });
}

svk_status svk_cmd_generate(const svk_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return invalid_argument("svk_cmd_generate(cfg, out_dir)");
  return guarded([&] { survkit::cmd_generate(survkit::parse_experiment_config(cfg->kv), out_dir); });
}

svk_status svk_cmd_train(const svk_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return invalid_argument("svk_cmd_train(cfg, out_dir)");
  return guarded([&] { survkit::cmd_train(survkit::parse_experiment_config(cfg->kv), out_dir); });
}

svk_status svk_cmd_eval(const svk_config* cfg, const char* checkpoint, const char* dataset_csv,
                        const char* out_dir) {
  if (!cfg || !out_dir) return invalid_argument("svk_cmd_eval(cfg, out_dir)");
  return guarded([&] {
    survkit::cmd_eval(survkit::parse_experiment_config(cfg->kv), checkpoint ? checkpoint : "",
                      dataset_csv ? dataset_csv : "", out_dir);
  });
}

svk_status svk_cmd_sweep_tau(const svk_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return invalid_argument("svk_cmd_sweep_tau(cfg, out_dir)");
  return guarded([&] { survkit::cmd_sweep_tau(survkit::parse_experiment_config(cfg->kv), out_dir); });
}

svk_status svk_cmd_sweep_fusion(const svk_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return invalid_argument("svk_cmd_sweep_fusion(cfg, out_dir)");
  return guarded([&] { survkit::cmd_sweep_fusion(survkit::parse_experiment_config(cfg->kv), out_dir); });
}

svk_status svk_cmd_stability(const svk_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return invalid_argument("svk_cmd_stability(cfg, out_dir)");
  return guarded([&] { survkit::cmd_stability(survkit::parse_experiment_config(cfg->kv), out_dir); });
}

svk_status svk_cmd_compare(const svk_config* cfg, const char* checkpoint_1,
                           const char* checkpoint_2, const char* dataset_csv, const char* out_dir) {
  if (!cfg || !checkpoint_1 || !checkpoint_2 || !out_dir)
    return invalid_argument("svk_cmd_compare(cfg, checkpoint_1, checkpoint_2, out_dir)");
  return guarded([&] {
    survkit::cmd_compare(survkit::parse_experiment_config(cfg->kv), checkpoint_1, checkpoint_2,
                         dataset_csv ? dataset_csv : "", out_dir);
  });
}

}  // extern "C"
