#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/pairing.hpp"

namespace survkit {

struct LossDiagnostics {
  long pairs_used = 0;
  int events_used = 0;
  int events_dropped = 0;
  int samples_excluded = 0;  // ce/cce: samples censored too early to label
};

// value plus the exact analytic gradient with respect to the per-sample
// scores (risks, or the flattened 2-per-sample logits for cce_loss).
struct LossOutput {
  double value = 0.0;
  std::vector<double> grad;
  LossDiagnostics diag;
};

struct WciConfig {
  double tau = 0.1;  // > 0
};

struct CceConfig {
  double cut = 36.0;  // months; intervals (0,cut] and (cut,inf)
};

enum class BciSurrogate {
  Exponential,  // exp(-(R_i - R_j)), the default
  LogSigmoid,   // -log sigmoid(R_i - R_j), for sensitivity analysis
};

// Pairwise CI surrogate with a dual average: inner mean over each event's
// risk-set pairs, outer mean over events. Overloads taking a PairIndex
// evaluate an already-built (or hand-made) Loss-mode pair structure.
LossOutput wci_loss(const PairIndex& pairs, std::span<const double> risks, const WciConfig& cfg);
LossOutput wci_loss(std::span<const double> times, std::span<const int> events,
                    std::span<const double> risks, const WciConfig& cfg);

// Same surrogate at unit temperature, but one global average over all pairs.
LossOutput bci_loss(const PairIndex& pairs, std::span<const double> risks,
                    BciSurrogate surrogate = BciSurrogate::Exponential);
LossOutput bci_loss(std::span<const double> times, std::span<const int> events,
                    std::span<const double> risks, BciSurrogate surrogate = BciSurrogate::Exponential);

// Negative mean Breslow partial log-likelihood; risk sets include the event
// itself. Shift-invariant in the risks.
LossOutput cox_loss(std::span<const double> times, std::span<const int> events,
                    std::span<const double> risks);

// Binary cross-entropy of sigmoid(risk) against label 1 for events and 0 for
// samples censored beyond `cut`; samples censored at or before `cut` carry no
// label and are excluded (counted in diagnostics).
LossOutput ce_loss(std::span<const double> times, std::span<const int> events,
                   std::span<const double> risks, double cut);

// Censored cross-entropy over two time bins. `logits` holds two entries per
// sample, row-major; grad matches that layout. The risk score to rank by is
// cce_risk_scores (the probability of the first bin).
LossOutput cce_loss(std::span<const double> times, std::span<const int> events,
                    std::span<const double> logits, const CceConfig& cfg);
std::vector<double> cce_risk_scores(std::span<const double> logits);

enum class LossId { Ce, Cce, Cox, Bci, Wci, WciNoTau };

struct LossEvalConfig {
  double tau = 0.1;
  double cut = 36.0;
  BciSurrogate bci_surrogate = BciSurrogate::Exponential;
};

// `scores` are risks for every loss except Cce, which takes 2*n logits.
LossOutput eval_loss(LossId id, std::span<const double> times, std::span<const int> events,
                     std::span<const double> scores, const LossEvalConfig& cfg);

// Central finite difference of eval_loss per coordinate against the analytic
// gradient. Returns max over coordinates of |fd - grad| / (1 + max(|fd|,|grad|)).
double loss_gradient_check(LossId id, std::span<const double> times, std::span<const int> events,
                           std::span<const double> scores, double h, const LossEvalConfig& cfg);

const char* loss_id_name(LossId id);
LossId parse_loss_id(const std::string& name);

}  // namespace survkit
