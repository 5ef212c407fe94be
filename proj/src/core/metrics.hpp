#pragma once

#include <span>
#include <vector>

#include "core/types.hpp"

namespace survkit {

// Cumulative/dynamic AUC at a horizon: cases are events with T <= horizon,
// controls are samples (any status) with T > horizon; samples censored at or
// before the horizon are excluded. Risk ties count 0.5. Throws DataError
// when either side is empty.
double time_dependent_auc(const Dataset& ds, std::span<const double> risks, double horizon);

struct McNemarResult {
  long b = 0;  // pairs ordered correctly by model 1 only
  long c = 0;  // pairs ordered correctly by model 2 only
  double statistic = 0.0;
  double p_value = 1.0;
};

// Paired test over the Metric-mode comparable pairs: each pair is a trial,
// correct means the model ranks the event sample strictly higher. The
// default statistic is chi-squared with continuity correction,
// (|b-c|-1)^2/(b+c); `exact` switches to the two-sided binomial test
// (recommended for b+c < 25).
McNemarResult mcnemar_ci(const Dataset& ds, std::span<const double> risks_1,
                         std::span<const double> risks_2, bool exact = false);

struct StabilityReport {
  std::vector<double> per_batch_losses;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation, n-1 denominator
  double cv = 0.0;       // std/mean, NaN unless mean > 0
};

StabilityReport batch_stability(std::span<const double> per_batch_losses);

}  // namespace survkit
