#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/types.hpp"

namespace survkit {

// Two readings of the comparable-pair set:
//   Loss:   j pairs with event i iff T_j >= T_i and j != i. Events whose risk
//           set comes out empty are dropped from event_indices (counted in
//           dropped_events) so the per-event inner averages stay defined.
//   Metric: j pairs with event i iff T_j > T_i (strict). Events with empty
//           pair lists are kept for bookkeeping.
enum class PairMode { Loss, Metric };

struct PairIndex {
  PairMode mode = PairMode::Loss;
  std::vector<int> event_indices;                 // i with O_i = 1
  std::vector<std::vector<int>> pairs_per_event;  // risk set of event_indices[k]
  int dropped_events = 0;

  std::size_t n_events() const { return event_indices.size(); }
  std::size_t n_pairs_of(std::size_t k) const { return pairs_per_event[k].size(); }
  std::size_t total_pairs() const {
    std::size_t n = 0;
    for (const auto& p : pairs_per_event) n += p.size();
    return n;
  }
};

PairIndex build_pairs(std::span<const double> times, std::span<const int> events, PairMode mode);
PairIndex build_pairs(const Dataset& ds, PairMode mode);

// Fraction of Metric-mode comparable pairs ordered correctly by the risk
// scores; risk ties count 0.5. Throws DataError when no pair is comparable.
double concordance_index(std::span<const double> times, std::span<const int> events,
                         std::span<const double> risks);
double concordance_index(const Dataset& ds, std::span<const double> risks);

}  // namespace survkit
