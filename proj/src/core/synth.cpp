#include "core/synth.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace survkit {

namespace {

std::vector<double> unit_constant(std::size_t dim) {
  return std::vector<double>(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

void validate(const SynthConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("synth: n must be >= 2");
  if (cfg.dim_a < 1 || cfg.dim_b < 1) throw ConfigError("synth: feature dims must be >= 1");
  if (!(cfg.baseline_rate > 0.0)) throw ConfigError("synth: baseline_rate must be > 0");
  if (!(cfg.censor_rate > 0.0)) throw ConfigError("synth: censor_rate must be > 0");
  if (!(cfg.time_scale > 0.0)) throw ConfigError("synth: time_scale must be > 0");
  if (!cfg.beta_a.empty() && cfg.beta_a.size() != cfg.dim_a)
    throw ConfigError("synth: beta_a has " + std::to_string(cfg.beta_a.size()) + " entries, dim_a is " +
                      std::to_string(cfg.dim_a));
  if (!cfg.beta_b.empty() && cfg.beta_b.size() != cfg.dim_b)
    throw ConfigError("synth: beta_b has " + std::to_string(cfg.beta_b.size()) + " entries, dim_b is " +
                      std::to_string(cfg.dim_b));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<double> SynthConfig::resolved_beta_a() const {
  return beta_a.empty() ? unit_constant(dim_a) : beta_a;
}

std::vector<double> SynthConfig::resolved_beta_b() const {
  return beta_b.empty() ? unit_constant(dim_b) : beta_b;
}

Dataset generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  const auto ba = cfg.resolved_beta_a();
  const auto bb = cfg.resolved_beta_b();

  Rng rng(cfg.seed);
  Dataset ds;
  ds.dim_a = cfg.dim_a;
  ds.dim_b = cfg.dim_b;
  ds.name = "synthetic";
  ds.records.reserve(cfg.n);

  for (std::size_t i = 0; i < cfg.n; ++i) {
    SurvivalRecord rec;
    rec.id = static_cast<std::int64_t>(i);
    rec.features_a.resize(cfg.dim_a);
    rec.features_b.resize(cfg.dim_b);
    for (auto& x : rec.features_a) x = rng.normal();
    for (auto& x : rec.features_b) x = rng.normal();

    const double log_risk = dot(ba, rec.features_a) + dot(bb, rec.features_b);
    const double t_event = cfg.time_scale * rng.exponential(cfg.baseline_rate * std::exp(log_risk));
    const double t_censor = cfg.time_scale * rng.exponential(cfg.censor_rate);

    rec.event = t_event <= t_censor ? 1 : 0;
    rec.time = rec.event ? t_event : t_censor;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

double oracle_risk(const SynthConfig& cfg, const SurvivalRecord& record) {
  if (record.features_a.size() != cfg.dim_a || record.features_b.size() != cfg.dim_b)
    throw DataError("oracle_risk: record dims (" + std::to_string(record.features_a.size()) + "," +
                    std::to_string(record.features_b.size()) + ") do not match config (" +
                    std::to_string(cfg.dim_a) + "," + std::to_string(cfg.dim_b) + ")");
  return dot(cfg.resolved_beta_a(), record.features_a) + dot(cfg.resolved_beta_b(), record.features_b);
}

std::vector<double> oracle_risks(const SynthConfig& cfg, const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size());
  for (const auto& r : ds.records) out.push_back(oracle_risk(cfg, r));
  return out;
}

}  // namespace survkit
