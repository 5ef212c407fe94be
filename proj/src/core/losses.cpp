#include "core/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace survkit {

namespace {

// Pair surrogates clamp the exponent so a wild score cannot overflow; the
// clamped branch is flat, so its derivative is zero.
constexpr double kMaxExponent = 60.0;

double clamped_exp(double z, bool& clamped) {
  clamped = std::abs(z) > kMaxExponent;
  return std::exp(std::clamp(z, -kMaxExponent, kMaxExponent));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > kMaxExponent) return x;
  return std::log1p(std::exp(std::min(x, kMaxExponent)));
}

void check_sizes(std::span<const double> times, std::span<const int> events,
                 std::span<const double> scores, std::size_t per_sample, const char* who) {
  if (times.size() != events.size() || scores.size() != per_sample * times.size())
    throw DataError(std::string(who) + ": inconsistent batch sizes");
}

}  // namespace

LossOutput wci_loss(const PairIndex& pairs, std::span<const double> risks, const WciConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw ConfigError("wci: tau must be > 0");
  if (pairs.n_events() == 0) throw DataError("wci: no comparable pairs");

  LossOutput out;
  out.grad.assign(risks.size(), 0.0);
  out.diag.events_used = static_cast<int>(pairs.n_events());
  out.diag.events_dropped = pairs.dropped_events;

  const double outer = 1.0 / static_cast<double>(pairs.n_events());
  double value = 0.0;
  for (std::size_t k = 0; k < pairs.n_events(); ++k) {
    const int i = pairs.event_indices[k];
    const auto& risk_set = pairs.pairs_per_event[k];
    const double inner = 1.0 / static_cast<double>(risk_set.size());
    double event_sum = 0.0;
    for (int j : risk_set) {
      bool clamped = false;
      const double term = clamped_exp(-(risks[i] - risks[j]) / cfg.tau, clamped);
      event_sum += term;
      if (!clamped) {
        const double d = outer * inner * term / cfg.tau;
        out.grad[static_cast<std::size_t>(i)] -= d;
        out.grad[static_cast<std::size_t>(j)] += d;
      }
      ++out.diag.pairs_used;
    }
    value += inner * event_sum;
  }
  out.value = outer * value;
  return out;
}

LossOutput wci_loss(std::span<const double> times, std::span<const int> events,
                    std::span<const double> risks, const WciConfig& cfg) {
  check_sizes(times, events, risks, 1, "wci");
  return wci_loss(build_pairs(times, events, PairMode::Loss), risks, cfg);
}

LossOutput bci_loss(const PairIndex& pairs, std::span<const double> risks, BciSurrogate surrogate) {
  const std::size_t total = pairs.total_pairs();
  if (total == 0) throw DataError("bci: no comparable pairs");

  LossOutput out;
  out.grad.assign(risks.size(), 0.0);
  out.diag.pairs_used = static_cast<long>(total);
  out.diag.events_used = static_cast<int>(pairs.n_events());
  out.diag.events_dropped = pairs.dropped_events;

  const double scale = 1.0 / static_cast<double>(total);
  double value = 0.0;
  for (std::size_t k = 0; k < pairs.n_events(); ++k) {
    const int i = pairs.event_indices[k];
    for (int j : pairs.pairs_per_event[k]) {
      const double diff = risks[i] - risks[j];
      if (surrogate == BciSurrogate::Exponential) {
        bool clamped = false;
        const double term = clamped_exp(-diff, clamped);
        value += term;
        if (!clamped) {
          out.grad[static_cast<std::size_t>(i)] -= scale * term;
          out.grad[static_cast<std::size_t>(j)] += scale * term;
        }
      } else {
        value += softplus(-diff);
        const double d = 1.0 - stable_sigmoid(diff);  // d(-log sigmoid(diff))/d diff = -(1 - sigmoid)
        out.grad[static_cast<std::size_t>(i)] -= scale * d;
        out.grad[static_cast<std::size_t>(j)] += scale * d;
      }
    }
  }
  out.value = scale * value;
  return out;
}

LossOutput bci_loss(std::span<const double> times, std::span<const int> events,
                    std::span<const double> risks, BciSurrogate surrogate) {
  check_sizes(times, events, risks, 1, "bci");
  return bci_loss(build_pairs(times, events, PairMode::Loss), risks, surrogate);
}

LossOutput cox_loss(std::span<const double> times, std::span<const int> events,
                    std::span<const double> risks) {
  check_sizes(times, events, risks, 1, "cox");
  const int n = static_cast<int>(times.size());
  int n_events = 0;
  for (int e : events) n_events += e;
  if (n_events == 0) throw DataError("cox: no events in batch");

  LossOutput out;
  out.grad.assign(risks.size(), 0.0);
  out.diag.events_used = n_events;

  const double scale = 1.0 / static_cast<double>(n_events);
  double value = 0.0;
  for (int i = 0; i < n; ++i) {
    if (events[i] != 1) continue;
    // Breslow: the risk set of every event keeps all samples with T_j >= T_i,
    // tied events included, and i itself is always a member.
    double zmax = risks[i];
    for (int j = 0; j < n; ++j)
      if (times[j] >= times[i]) zmax = std::max(zmax, risks[j]);
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      if (times[j] >= times[i]) {
        denom += std::exp(risks[j] - zmax);
        ++out.diag.pairs_used;
      }
    }
    const double log_denom = zmax + std::log(denom);
    value -= risks[i] - log_denom;

    out.grad[static_cast<std::size_t>(i)] -= scale;
    for (int j = 0; j < n; ++j) {
      if (times[j] >= times[i])
        out.grad[static_cast<std::size_t>(j)] += scale * std::exp(risks[j] - zmax) / denom;
    }
  }
  out.value = scale * value;
  return out;
}

LossOutput ce_loss(std::span<const double> times, std::span<const int> events,
                   std::span<const double> risks, double cut) {
  check_sizes(times, events, risks, 1, "ce");
  if (!(cut > 0.0)) throw ConfigError("ce: cut must be > 0");
  const int n = static_cast<int>(times.size());

  LossOutput out;
  out.grad.assign(risks.size(), 0.0);

  int labelable = 0;
  for (int i = 0; i < n; ++i) {
    if (events[i] == 1 || times[i] > cut)
      ++labelable;
    else
      ++out.diag.samples_excluded;
  }
  if (labelable == 0) throw DataError("ce: no labelable samples (all censored at or before cut)");

  const double scale = 1.0 / static_cast<double>(labelable);
  double value = 0.0;
  for (int i = 0; i < n; ++i) {
    const bool is_event = events[i] == 1;
    if (!is_event && !(times[i] > cut)) continue;
    const double y = is_event ? 1.0 : 0.0;
    // BCE with logits: softplus(-R) + (1 - y) R, gradient sigmoid(R) - y.
    value += softplus(-risks[i]) + (1.0 - y) * risks[i];
    out.grad[static_cast<std::size_t>(i)] = scale * (stable_sigmoid(risks[i]) - y);
    if (is_event) ++out.diag.events_used;
  }
  out.value = scale * value;
  return out;
}

LossOutput cce_loss(std::span<const double> times, std::span<const int> events,
                    std::span<const double> logits, const CceConfig& cfg) {
  check_sizes(times, events, logits, 2, "cce");
  if (!(cfg.cut > 0.0)) throw ConfigError("cce: cut must be > 0");
  const int n = static_cast<int>(times.size());

  LossOutput out;
  out.grad.assign(logits.size(), 0.0);

  // Bin 0 is (0, cut], bin 1 is (cut, inf). A sample censored at or before
  // the cut rules out neither bin, so its -log(p0 + p1) term is identically
  // zero; it is excluded and counted.
  int contributing = 0;
  for (int i = 0; i < n; ++i) {
    if (events[i] == 1 || times[i] > cfg.cut)
      ++contributing;
    else
      ++out.diag.samples_excluded;
  }
  if (contributing == 0) throw DataError("cce: no contributing samples");

  const double scale = 1.0 / static_cast<double>(contributing);
  double value = 0.0;
  for (int i = 0; i < n; ++i) {
    const bool in_first_bin = events[i] == 1 && times[i] <= cfg.cut;
    if (events[i] != 1 && !(times[i] > cfg.cut)) continue;
    const std::size_t base = 2 * static_cast<std::size_t>(i);
    const double z0 = logits[base], z1 = logits[base + 1];
    const double zmax = std::max(z0, z1);
    const double lse = zmax + std::log(std::exp(z0 - zmax) + std::exp(z1 - zmax));
    const double p0 = std::exp(z0 - lse), p1 = std::exp(z1 - lse);
    const int cls = in_first_bin ? 0 : 1;
    value += lse - (cls == 0 ? z0 : z1);
    out.grad[base] = scale * (p0 - (cls == 0 ? 1.0 : 0.0));
    out.grad[base + 1] = scale * (p1 - (cls == 1 ? 1.0 : 0.0));
    if (events[i] == 1) ++out.diag.events_used;
  }
  out.value = scale * value;
  return out;
}

std::vector<double> cce_risk_scores(std::span<const double> logits) {
  std::vector<double> risks(logits.size() / 2);
  for (std::size_t i = 0; i < risks.size(); ++i) {
    const double z0 = logits[2 * i], z1 = logits[2 * i + 1];
    risks[i] = stable_sigmoid(z0 - z1);  // softmax probability of the early bin
  }
  return risks;
}

LossOutput eval_loss(LossId id, std::span<const double> times, std::span<const int> events,
                     std::span<const double> scores, const LossEvalConfig& cfg) {
  switch (id) {
    case LossId::Wci:
      return wci_loss(times, events, scores, WciConfig{cfg.tau});
    case LossId::WciNoTau:
      return wci_loss(times, events, scores, WciConfig{1.0});
    case LossId::Bci:
      return bci_loss(times, events, scores, cfg.bci_surrogate);
    case LossId::Cox:
      return cox_loss(times, events, scores);
    case LossId::Ce:
      return ce_loss(times, events, scores, cfg.cut);
    case LossId::Cce:
      return cce_loss(times, events, scores, CceConfig{cfg.cut});
  }
  throw ConfigError("unknown loss id");
}

double loss_gradient_check(LossId id, std::span<const double> times, std::span<const int> events,
                           std::span<const double> scores, double h, const LossEvalConfig& cfg) {
  if (!(h > 0.0)) throw ConfigError("gradient check: h must be > 0");
  const LossOutput base = eval_loss(id, times, events, scores, cfg);
  std::vector<double> perturbed(scores.begin(), scores.end());

  double max_rel = 0.0;
  for (std::size_t k = 0; k < perturbed.size(); ++k) {
    const double orig = perturbed[k];
    perturbed[k] = orig + h;
    const double up = eval_loss(id, times, events, perturbed, cfg).value;
    perturbed[k] = orig - h;
    const double down = eval_loss(id, times, events, perturbed, cfg).value;
    perturbed[k] = orig;
    const double fd = (up - down) / (2.0 * h);
    const double rel = std::abs(fd - base.grad[k]) / (1.0 + std::max(std::abs(fd), std::abs(base.grad[k])));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

const char* loss_id_name(LossId id) {
  switch (id) {
    case LossId::Ce: return "ce";
    case LossId::Cce: return "cce";
    case LossId::Cox: return "cox";
    case LossId::Bci: return "bci";
    case LossId::Wci: return "wci";
    case LossId::WciNoTau: return "wci_no_tau";
  }
  return "?";
}

LossId parse_loss_id(const std::string& name) {
  if (name == "ce") return LossId::Ce;
  if (name == "cce") return LossId::Cce;
  if (name == "cox") return LossId::Cox;
  if (name == "bci") return LossId::Bci;
  if (name == "wci") return LossId::Wci;
  if (name == "wci_no_tau") return LossId::WciNoTau;
  throw ConfigError("unknown loss '" + name + "' (want ce|cce|cox|bci|wci|wci_no_tau)");
}

}  // namespace survkit
