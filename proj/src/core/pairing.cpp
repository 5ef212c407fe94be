#include "core/pairing.hpp"

#include <string>

#include "core/errors.hpp"

namespace survkit {

PairIndex build_pairs(std::span<const double> times, std::span<const int> events, PairMode mode) {
  const int n = static_cast<int>(times.size());
  PairIndex idx;
  idx.mode = mode;
  for (int i = 0; i < n; ++i) {
    if (events[i] != 1) continue;
    std::vector<int> risk_set;
    for (int j = 0; j < n; ++j) {
      if (mode == PairMode::Loss) {
        if (j != i && times[j] >= times[i]) risk_set.push_back(j);
      } else {
        if (times[j] > times[i]) risk_set.push_back(j);
      }
    }
    if (mode == PairMode::Loss && risk_set.empty()) {
      ++idx.dropped_events;
      continue;
    }
    idx.event_indices.push_back(i);
    idx.pairs_per_event.push_back(std::move(risk_set));
  }
  return idx;
}

PairIndex build_pairs(const Dataset& ds, PairMode mode) {
  return build_pairs(ds.times(), ds.events(), mode);
}

double concordance_index(std::span<const double> times, std::span<const int> events,
                         std::span<const double> risks) {
  if (risks.size() != times.size())
    throw DataError("concordance_index: " + std::to_string(risks.size()) + " risks for " +
                    std::to_string(times.size()) + " samples");
  const PairIndex idx = build_pairs(times, events, PairMode::Metric);
  const std::size_t total = idx.total_pairs();
  if (total == 0) throw DataError("undefined CI: no comparable pairs");

  double concordant = 0.0;
  for (std::size_t k = 0; k < idx.n_events(); ++k) {
    const int i = idx.event_indices[k];
    for (int j : idx.pairs_per_event[k]) {
      if (risks[i] > risks[j])
        concordant += 1.0;
      else if (risks[i] == risks[j])
        concordant += 0.5;
    }
  }
  return concordant / static_cast<double>(total);
}

double concordance_index(const Dataset& ds, std::span<const double> risks) {
  return concordance_index(ds.times(), ds.events(), risks);
}

}  // namespace survkit
