#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace survkit {

// One subject: two tabular feature groups, observed time in months and an
// event indicator (1 = event observed, 0 = right-censored).
struct SurvivalRecord {
  std::int64_t id = 0;
  std::vector<double> features_a;
  std::vector<double> features_b;
  double time = 0.0;  // > 0
  int event = 0;      // 0 or 1

  bool operator==(const SurvivalRecord&) const = default;
};

struct Dataset {
  std::vector<SurvivalRecord> records;
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  std::string name;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(records.size());
    for (const auto& r : records) t.push_back(r.time);
    return t;
  }

  std::vector<int> events() const {
    std::vector<int> e;
    e.reserve(records.size());
    for (const auto& r : records) e.push_back(r.event);
    return e;
  }

  std::size_t n_events() const {
    std::size_t n = 0;
    for (const auto& r : records) n += static_cast<std::size_t>(r.event);
    return n;
  }

  bool operator==(const Dataset&) const = default;
};

inline double event_fraction(const Dataset& ds) {
  if (ds.empty()) return 0.0;
  return static_cast<double>(ds.n_events()) / static_cast<double>(ds.size());
}

inline double censored_fraction(const Dataset& ds) {
  if (ds.empty()) return 0.0;
  return 1.0 - event_fraction(ds);
}

}  // namespace survkit
