#pragma once

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace survkit {

// Proportional-hazards simulator. Features are standard normal; the latent
// event time is Exponential with rate baseline_rate * exp(beta_a.x_a +
// beta_b.x_b), the censoring time Exponential(censor_rate), both scaled by
// time_scale. Observed time is the minimum of the two.
struct SynthConfig {
  std::size_t n = 2000;
  std::size_t dim_a = 8;
  std::size_t dim_b = 4;
  std::vector<double> beta_a;  // empty -> constant vector with unit norm
  std::vector<double> beta_b;  // empty -> constant vector with unit norm
  double baseline_rate = 0.02;
  double censor_rate = 0.01;
  double time_scale = 1.0;  // months per time unit
  std::uint64_t seed = 1;

  std::vector<double> resolved_beta_a() const;
  std::vector<double> resolved_beta_b() const;
};

// Throws ConfigError on invalid settings. Deterministic for a fixed config.
Dataset generate_synthetic(const SynthConfig& cfg);

// True log-risk beta_a.x_a + beta_b.x_b, the Bayes-optimal ranking score for
// data drawn from `cfg`. Throws DataError on dimension mismatch.
double oracle_risk(const SynthConfig& cfg, const SurvivalRecord& record);

std::vector<double> oracle_risks(const SynthConfig& cfg, const Dataset& ds);

}  // namespace survkit
