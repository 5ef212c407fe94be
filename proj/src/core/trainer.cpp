#include "core/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "core/errors.hpp"
#include "core/pairing.hpp"
#include "core/rng.hpp"

namespace survkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Splits the rng stream per epoch so epoch plans are independent of how many
// draws earlier epochs consumed.
std::uint64_t epoch_seed(std::uint64_t seed, int epoch) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(epoch + 1));
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  return x;
}

std::vector<double> gather(const std::vector<double>& src, const std::vector<std::size_t>& idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = src[idx[i]];
  return out;
}

std::vector<int> gather(const std::vector<int>& src, const std::vector<std::size_t>& idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = src[idx[i]];
  return out;
}

struct Velocity {
  std::vector<std::vector<double>> head_a_w, head_a_b, head_b_w, head_b_b;

  explicit Velocity(const RiskModel& m) {
    auto zeros_like = [](const std::vector<std::vector<double>>& p) {
      std::vector<std::vector<double>> v;
      for (const auto& t : p) v.emplace_back(t.size(), 0.0);
      return v;
    };
    head_a_w = zeros_like(m.head_a.weights);
    head_a_b = zeros_like(m.head_a.biases);
    head_b_w = zeros_like(m.head_b.weights);
    head_b_b = zeros_like(m.head_b.biases);
  }
};

void sgd_update(std::vector<double>& param, std::vector<double>& vel, const std::vector<double>& grad,
                double lr, double momentum, double weight_decay) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    vel[i] = momentum * vel[i] + grad[i];
    param[i] -= lr * vel[i] + lr * weight_decay * param[i];
  }
}

void apply_step(RiskModel& model, Velocity& vel, const ParameterGradients& grads, double lr,
                const OptimConfig& cfg) {
  for (std::size_t l = 0; l < model.head_a.weights.size(); ++l) {
    sgd_update(model.head_a.weights[l], vel.head_a_w[l], grads.head_a.weights[l], lr, cfg.momentum,
               cfg.weight_decay);
    sgd_update(model.head_a.biases[l], vel.head_a_b[l], grads.head_a.biases[l], lr, cfg.momentum,
               cfg.weight_decay);
  }
  for (std::size_t l = 0; l < model.head_b.weights.size(); ++l) {
    sgd_update(model.head_b.weights[l], vel.head_b_w[l], grads.head_b.weights[l], lr, cfg.momentum,
               cfg.weight_decay);
    sgd_update(model.head_b.biases[l], vel.head_b_b[l], grads.head_b.biases[l], lr, cfg.momentum,
               cfg.weight_decay);
  }
}

}  // namespace

void validate(const OptimConfig& cfg) {
  if (!(cfg.lr_init > 0.0) || !(cfg.lr_peak > 0.0)) throw ConfigError("optim: learning rates must be > 0");
  if (cfg.warmup_epochs < 0 || cfg.epochs < 0) throw ConfigError("optim: epoch counts must be >= 0");
  if (cfg.epochs > 0 && cfg.warmup_epochs >= cfg.epochs)
    throw ConfigError("optim: warmup_epochs must be < epochs");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) throw ConfigError("optim: momentum must be in [0,1)");
  if (cfg.weight_decay < 0.0) throw ConfigError("optim: weight_decay must be >= 0");
  if (cfg.batch_size < 8 || cfg.batch_size % 8 != 0)
    throw ConfigError("optim: batch_size must be a positive multiple of 8");
}

double lr_at(const OptimConfig& cfg, int epoch, int step, int steps_per_epoch) {
  const double t = static_cast<double>(epoch) +
                   (steps_per_epoch > 0 ? static_cast<double>(step) / steps_per_epoch : 0.0);
  const double warmup = static_cast<double>(cfg.warmup_epochs);
  if (t < warmup) return cfg.lr_init + (cfg.lr_peak - cfg.lr_init) * (t / warmup);
  const double span = static_cast<double>(cfg.epochs) - warmup;
  const double frac = std::clamp((t - warmup) / span, 0.0, 1.0);
  return cfg.lr_peak * 0.5 * (1.0 + std::cos(kPi * frac));
}

std::vector<std::vector<std::size_t>> plan_epoch_batches(const Dataset& ds, const SamplerPolicy& policy,
                                                         int batch_size, int epoch) {
  if (ds.empty()) throw DataError("sampler: empty dataset");
  const std::size_t n = ds.size();
  const auto bsz = static_cast<std::size_t>(batch_size);
  Rng rng(epoch_seed(policy.seed, epoch));

  std::vector<std::vector<std::size_t>> batches;
  if (policy.kind == SamplerKind::Uniform) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    for (std::size_t start = 0; start < n; start += bsz) {
      const std::size_t end = std::min(start + bsz, n);
      batches.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                           perm.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
  }

  std::vector<std::size_t> event_idx, censored_idx;
  for (std::size_t i = 0; i < n; ++i) (ds.records[i].event ? event_idx : censored_idx).push_back(i);

  const std::size_t steps = std::max<std::size_t>(1, n / bsz);
  for (std::size_t s = 0; s < steps; ++s) {
    int want_events;
    if (policy.kind == SamplerKind::EventBalanced) {
      want_events = static_cast<int>(std::lround(static_cast<double>(batch_size) * event_fraction(ds)));
      want_events = std::clamp(want_events, event_idx.empty() ? 0 : 1, batch_size);
    } else {
      if (policy.skew_min < 0 || policy.skew_max < policy.skew_min || policy.skew_max > batch_size)
        throw ConfigError("sampler: skew range must satisfy 0 <= min <= max <= batch_size");
      want_events = rng.range_int(policy.skew_min, policy.skew_max);
    }
    if (event_idx.empty()) want_events = 0;
    if (censored_idx.empty()) want_events = batch_size;

    std::vector<std::size_t> batch;
    batch.reserve(bsz);
    for (int k = 0; k < want_events; ++k) batch.push_back(event_idx[rng.below(event_idx.size())]);
    for (int k = want_events; k < batch_size; ++k)
      batch.push_back(censored_idx[rng.below(censored_idx.size())]);
    batches.push_back(std::move(batch));
  }
  return batches;
}

SplitResult split(const Dataset& ds, double f_train, double f_val, double f_test, std::uint64_t seed) {
  if (f_train < 0.0 || f_val < 0.0 || f_test < 0.0 || std::abs(f_train + f_val + f_test - 1.0) > 1e-9)
    throw ConfigError("split: fractions must be nonnegative and sum to 1");

  const double fracs[3] = {f_train, f_val, f_test};
  Rng rng(seed);

  // Per-stratum floor allocation, remainder to the largest fractional parts.
  auto allocate = [&fracs](std::size_t count) {
    std::size_t sizes[3];
    double frac_part[3];
    std::size_t used = 0;
    for (int p = 0; p < 3; ++p) {
      const double want = fracs[p] * static_cast<double>(count);
      sizes[p] = static_cast<std::size_t>(std::floor(want));
      frac_part[p] = want - std::floor(want);
      used += sizes[p];
    }
    for (std::size_t r = used; r < count; ++r) {
      int best = 0;
      for (int p = 1; p < 3; ++p)
        if (frac_part[p] > frac_part[best]) best = p;
      ++sizes[best];
      frac_part[best] = -1.0;
    }
    return std::array<std::size_t, 3>{sizes[0], sizes[1], sizes[2]};
  };

  std::vector<std::size_t> event_idx, censored_idx;
  for (std::size_t i = 0; i < ds.size(); ++i)
    (ds.records[i].event ? event_idx : censored_idx).push_back(i);
  rng.shuffle(event_idx);
  rng.shuffle(censored_idx);

  SplitResult out;
  Dataset* parts[3] = {&out.train, &out.val, &out.test};
  for (auto* p : parts) {
    p->dim_a = ds.dim_a;
    p->dim_b = ds.dim_b;
    p->name = ds.name;
  }
  out.train.name += "/train";
  out.val.name += "/val";
  out.test.name += "/test";

  for (const auto* stratum : {&event_idx, &censored_idx}) {
    const auto sizes = allocate(stratum->size());
    std::size_t pos = 0;
    for (int p = 0; p < 3; ++p)
      for (std::size_t k = 0; k < sizes[p]; ++k) parts[p]->records.push_back(ds.records[(*stratum)[pos++]]);
  }
  // Keep the original record order within each part.
  for (auto* p : parts)
    std::sort(p->records.begin(), p->records.end(),
              [](const SurvivalRecord& a, const SurvivalRecord& b) { return a.id < b.id; });

  for (int p = 0; p < 3; ++p) {
    if (fracs[p] > 0.0 && parts[p]->n_events() == 0)
      throw DataError("split: part '" + parts[p]->name + "' received no events");
  }
  return out;
}

TrainResult train(RiskModel& model, const Dataset& train_ds, const Dataset& val_ds, LossId loss,
                  const LossEvalConfig& loss_cfg, const OptimConfig& optim, const SamplerPolicy& sampler) {
  validate(optim);
  if (train_ds.empty()) throw DataError("train: empty training set");
  if (train_ds.n_events() == 0) throw DataError("train: training set has no events");

  const std::vector<double> all_times = train_ds.times();
  const std::vector<int> all_events = train_ds.events();

  TrainResult result;
  Velocity velocity(model);

  for (int epoch = 0; epoch < optim.epochs; ++epoch) {
    const auto batches = plan_epoch_batches(train_ds, sampler, optim.batch_size, epoch);
    const int steps_per_epoch = static_cast<int>(batches.size());

    EpochStats stats;
    stats.epoch = epoch;
    std::vector<double> epoch_losses;

    for (int step = 0; step < steps_per_epoch; ++step) {
      const double lr = lr_at(optim, epoch, step, steps_per_epoch);
      stats.lr_last = lr;
      const auto& batch = batches[static_cast<std::size_t>(step)];
      const auto times = gather(all_times, batch);
      const auto events = gather(all_events, batch);

      ForwardCache cache;
      const std::vector<double> outputs = forward_batch(model, train_ds, batch, cache);

      LossOutput lo;
      try {
        lo = eval_loss(loss, times, events, outputs, loss_cfg);
      } catch (const DataError&) {
        ++stats.skipped;  // batch without usable pairs or labels
        continue;
      }
      const ParameterGradients grads = backward(model, cache, lo.grad);
      apply_step(model, velocity, grads, lr, optim);

      epoch_losses.push_back(lo.value);
      result.report.batch_losses.push_back(lo.value);
      ++stats.batches;
    }

    if (stats.batches == 0)
      throw DataError("degenerate sampler: every batch of epoch " + std::to_string(epoch) + " was skipped");
    result.report.skipped_batches += stats.skipped;

    double mean = 0.0;
    for (double v : epoch_losses) mean += v;
    mean /= static_cast<double>(epoch_losses.size());
    double var = 0.0;
    for (double v : epoch_losses) var += (v - mean) * (v - mean);
    stats.train_loss_mean = mean;
    stats.train_loss_std =
        epoch_losses.size() > 1 ? std::sqrt(var / static_cast<double>(epoch_losses.size() - 1)) : 0.0;

    if (!val_ds.empty()) {
      const std::vector<double> val_risks = predict_risks(model, val_ds);
      stats.val_ci = concordance_index(val_ds, val_risks);
      if (result.report.best_epoch < 0 || stats.val_ci > result.report.best_val_ci) {
        result.report.best_epoch = epoch;
        result.report.best_val_ci = stats.val_ci;
        result.best_model = model;
      }
    }
    result.report.epochs.push_back(stats);
  }
  return result;
}

}  // namespace survkit
