#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/pairing.hpp"

namespace survkit {

double time_dependent_auc(const Dataset& ds, std::span<const double> risks, double horizon) {
  if (risks.size() != ds.size()) throw DataError("auc: risks length does not match dataset");
  std::vector<std::size_t> cases, controls;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.records[i];
    if (r.time > horizon)
      controls.push_back(i);
    else if (r.event == 1)
      cases.push_back(i);
    // censored at or before the horizon: status at the horizon is unknown
  }
  if (cases.empty() || controls.empty())
    throw DataError("undefined AUC: need at least one case and one control at horizon");

  double hits = 0.0;
  for (std::size_t i : cases) {
    for (std::size_t j : controls) {
      if (risks[i] > risks[j])
        hits += 1.0;
      else if (risks[i] == risks[j])
        hits += 0.5;
    }
  }
  return hits / (static_cast<double>(cases.size()) * static_cast<double>(controls.size()));
}

namespace {

double binomial_two_sided_p(long b, long c) {
  const long n = b + c;
  if (n == 0) return 1.0;
  const long k = std::max(b, c);
  // Tail sum of Binomial(n, 1/2) from k to n, in log space for large n.
  double tail = 0.0;
  double log_coef = 0.0;  // log C(n, j) built incrementally from j = k
  for (long j = 1; j <= k; ++j) log_coef += std::log(static_cast<double>(n - j + 1)) - std::log(static_cast<double>(j));
  for (long j = k; j <= n; ++j) {
    tail += std::exp(log_coef - static_cast<double>(n) * std::log(2.0));
    if (j < n) log_coef += std::log(static_cast<double>(n - j)) - std::log(static_cast<double>(j + 1));
  }
  return std::min(1.0, 2.0 * tail);
}

}  // namespace

McNemarResult mcnemar_ci(const Dataset& ds, std::span<const double> risks_1,
                         std::span<const double> risks_2, bool exact) {
  if (risks_1.size() != ds.size() || risks_2.size() != ds.size())
    throw DataError("mcnemar: risk vectors must match dataset size");
  const PairIndex idx = build_pairs(ds, PairMode::Metric);
  if (idx.total_pairs() == 0) throw DataError("mcnemar: no comparable pairs");

  McNemarResult res;
  for (std::size_t k = 0; k < idx.n_events(); ++k) {
    const int i = idx.event_indices[k];
    for (int j : idx.pairs_per_event[k]) {
      const bool ok1 = risks_1[static_cast<std::size_t>(i)] > risks_1[static_cast<std::size_t>(j)];
      const bool ok2 = risks_2[static_cast<std::size_t>(i)] > risks_2[static_cast<std::size_t>(j)];
      if (ok1 && !ok2) ++res.b;
      if (ok2 && !ok1) ++res.c;
    }
  }

  const long n = res.b + res.c;
  if (n == 0) {
    res.statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }
  const double delta = std::abs(static_cast<double>(res.b - res.c));
  res.statistic = std::max(0.0, delta - 1.0) * std::max(0.0, delta - 1.0) / static_cast<double>(n);
  if (exact)
    res.p_value = binomial_two_sided_p(res.b, res.c);
  else
    // chi-squared(1) upper tail
    res.p_value = std::erfc(std::sqrt(res.statistic / 2.0));
  return res;
}

StabilityReport batch_stability(std::span<const double> per_batch_losses) {
  if (per_batch_losses.size() < 2) throw DataError("stability: need at least 2 batch losses");
  StabilityReport rep;
  rep.per_batch_losses.assign(per_batch_losses.begin(), per_batch_losses.end());

  double mean = 0.0;
  for (double v : per_batch_losses) mean += v;
  mean /= static_cast<double>(per_batch_losses.size());
  double var = 0.0;
  for (double v : per_batch_losses) var += (v - mean) * (v - mean);
  var /= static_cast<double>(per_batch_losses.size() - 1);

  rep.mean = mean;
  rep.std_dev = std::sqrt(var);
  rep.cv = mean > 0.0 ? rep.std_dev / mean : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace survkit
