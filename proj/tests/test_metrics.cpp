#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace survkit;

namespace {

Dataset make_dataset(const std::vector<double>& times, const std::vector<int>& events) {
  Dataset ds;
  ds.dim_a = 1;
  ds.dim_b = 1;
  for (std::size_t i = 0; i < times.size(); ++i) {
    SurvivalRecord r;
    r.id = static_cast<std::int64_t>(i);
    r.features_a = {0.0};
    r.features_b = {0.0};
    r.time = times[i];
    r.event = events[i];
    ds.records.push_back(r);
  }
  return ds;
}

// Star dataset: one early event and `m` later controls, every pair (0, j)
// comparable. Risk vectors then dial in any (b, c) disagreement pattern.
struct StarPair {
  Dataset ds;
  std::vector<double> risks_1, risks_2;
};

StarPair star_with_counts(int b, int c, int both_correct) {
  const int m = b + c + both_correct;
  std::vector<double> times = {1.0};
  std::vector<int> events = {1};
  for (int j = 0; j < m; ++j) {
    times.push_back(2.0);
    events.push_back(0);
  }
  StarPair s;
  s.ds = make_dataset(times, events);
  s.risks_1.assign(static_cast<std::size_t>(m) + 1, 0.0);
  s.risks_2.assign(static_cast<std::size_t>(m) + 1, 0.0);
  s.risks_1[0] = 0.5;
  s.risks_2[0] = 0.5;
  int j = 1;
  for (int k = 0; k < b; ++k, ++j) { s.risks_1[j] = 0.0; s.risks_2[j] = 1.0; }  // model 1 only
  for (int k = 0; k < c; ++k, ++j) { s.risks_1[j] = 1.0; s.risks_2[j] = 0.0; }  // model 2 only
  for (int k = 0; k < both_correct; ++k, ++j) { s.risks_1[j] = 0.0; s.risks_2[j] = 0.0; }
  return s;
}

// chi-squared(1) upper tail by Simpson's rule on the density.
double chi2_tail_oracle(double x0) {
  auto pdf = [](double x) { return std::exp(-x / 2.0) / std::sqrt(2.0 * M_PI * x); };
  const double hi = x0 + 200.0;
  const int n = 200000;  // even
  const double h = (hi - x0) / n;
  double acc = pdf(x0) + pdf(hi);
  for (int i = 1; i < n; ++i) acc += pdf(x0 + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("time-dependent auc hand examples") {
  // Cases {0}, controls {1, 2}; both comparisons favor the case.
  const Dataset ds = make_dataset({12.0, 40.0, 50.0}, {1, 0, 1});
  const std::vector<double> risks = {0.9, 0.2, 0.4};
  CHECK(time_dependent_auc(ds, risks, 36.0) == 1.0);

  const std::vector<double> equal = {0.5, 0.5, 0.5};
  CHECK(time_dependent_auc(ds, equal, 36.0) == 0.5);

  // Monotone transforms leave the auc alone.
  std::vector<double> warped(risks);
  for (auto& r : warped) r = std::tanh(3.0 * r) + 2.0;
  CHECK(time_dependent_auc(ds, warped, 36.0) == time_dependent_auc(ds, risks, 36.0));
}

TEST_CASE("auc excludes early censorings and errors on empty sides") {
  // The early censoring (T=20, O=0) is neither case nor control.
  const Dataset ds = make_dataset({12.0, 20.0, 50.0}, {1, 0, 0});
  const std::vector<double> risks = {0.1, 0.99, 0.9};
  CHECK(time_dependent_auc(ds, risks, 36.0) == 0.0);  // single case ranked below the control

  const Dataset no_controls = make_dataset({12.0, 20.0}, {1, 1});
  const std::vector<double> r2 = {0.5, 0.4};
  CHECK_THROWS_WITH_AS(time_dependent_auc(no_controls, r2, 36.0), doctest::Contains("undefined AUC"),
                       DataError);

  const Dataset no_cases = make_dataset({40.0, 50.0}, {0, 1});
  CHECK_THROWS_AS(time_dependent_auc(no_cases, r2, 36.0), DataError);
}

TEST_CASE("auc at the cut matches roc-auc of the ce labeling when they agree") {
  // Every event falls before the horizon and every censoring after it, so
  // auc's cases/controls coincide with ce_loss's 1/0 labels.
  Rng rng(19);
  std::vector<double> times, risks;
  std::vector<int> events, labels;
  for (int i = 0; i < 60; ++i) {
    const bool is_event = rng.below(2) == 0;
    times.push_back(is_event ? 1.0 + 30.0 * rng.uniform01() : 37.0 + 30.0 * rng.uniform01());
    events.push_back(is_event ? 1 : 0);
    labels.push_back(is_event ? 1 : 0);
    risks.push_back(rng.uniform01());
  }
  const Dataset ds = make_dataset(times, events);

  // Independent ROC-AUC over the binary labels.
  double hits = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < risks.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (risks[i] > risks[j])
        hits += 1.0;
      else if (risks[i] == risks[j])
        hits += 0.5;
    }
  }
  REQUIRE(pairs > 0);
  CHECK(time_dependent_auc(ds, risks, 36.0) == hits / static_cast<double>(pairs));
}

TEST_CASE("mcnemar on identical risks is a null result") {
  const StarPair s = star_with_counts(0, 0, 10);
  const McNemarResult res = mcnemar_ci(s.ds, s.risks_1, s.risks_1);
  CHECK(res.b == 0);
  CHECK(res.c == 0);
  CHECK(res.statistic == 0.0);
  CHECK(res.p_value == 1.0);
}

TEST_CASE("mcnemar statistic and p-value for b=10, c=2") {
  const StarPair s = star_with_counts(10, 2, 8);
  const McNemarResult res = mcnemar_ci(s.ds, s.risks_1, s.risks_2);
  CHECK(res.b == 10);
  CHECK(res.c == 2);
  CHECK(res.statistic == doctest::Approx(49.0 / 12.0).epsilon(1e-14));
  CHECK(res.p_value == doctest::Approx(0.0433).epsilon(1e-2));
  CHECK(std::abs(res.p_value - chi2_tail_oracle(49.0 / 12.0)) < 1e-6);
}

TEST_CASE("swapping the models swaps b and c, keeping statistic and p") {
  const StarPair s = star_with_counts(7, 3, 5);
  const McNemarResult fwd = mcnemar_ci(s.ds, s.risks_1, s.risks_2);
  const McNemarResult rev = mcnemar_ci(s.ds, s.risks_2, s.risks_1);
  CHECK(fwd.b == rev.c);
  CHECK(fwd.c == rev.b);
  CHECK(fwd.statistic == rev.statistic);
  CHECK(fwd.p_value == rev.p_value);
}

TEST_CASE("p-value decreases as the disagreement grows, b+c fixed") {
  double prev = 2.0;
  for (int b = 10; b <= 20; b += 2) {
    const int c = 20 - b;
    const StarPair s = star_with_counts(b, c, 0);
    const McNemarResult res = mcnemar_ci(s.ds, s.risks_1, s.risks_2);
    CHECK(res.p_value <= prev);
    prev = res.p_value;
  }
}

TEST_CASE("exact binomial variant for small disagreement counts") {
  const StarPair s = star_with_counts(10, 2, 8);
  const McNemarResult res = mcnemar_ci(s.ds, s.risks_1, s.risks_2, /*exact=*/true);
  // 2 * sum_{k=10}^{12} C(12,k) / 2^12 = 2 * 79 / 4096
  CHECK(res.p_value == doctest::Approx(158.0 / 4096.0).epsilon(1e-12));

  const StarPair even = star_with_counts(5, 5, 0);
  CHECK(mcnemar_ci(even.ds, even.risks_1, even.risks_2, true).p_value == 1.0);
}

TEST_CASE("mcnemar requires comparable pairs") {
  const Dataset ds = make_dataset({1.0, 2.0}, {0, 0});
  const std::vector<double> risks = {0.5, 0.4};
  CHECK_THROWS_AS(mcnemar_ci(ds, risks, risks), DataError);
}

TEST_CASE("batch stability statistics") {
  const std::vector<double> constant = {2.5, 2.5, 2.5, 2.5};
  const StabilityReport flat = batch_stability(constant);
  CHECK(flat.std_dev == 0.0);
  CHECK(flat.cv == 0.0);

  const std::vector<double> pair = {1.0, 3.0};
  const StabilityReport two = batch_stability(pair);
  CHECK(two.mean == 2.0);
  CHECK(two.std_dev == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(two.cv == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));

  // Scaling the series scales std, not cv.
  const std::vector<double> scaled = {3.0, 9.0};
  const StabilityReport big = batch_stability(scaled);
  CHECK(big.std_dev == doctest::Approx(3.0 * two.std_dev).epsilon(1e-14));
  CHECK(big.cv == doctest::Approx(two.cv).epsilon(1e-14));

  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(batch_stability(one), DataError);
}
