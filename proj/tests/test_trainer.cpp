#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>

#include "core/errors.hpp"
#include "core/pairing.hpp"
#include "core/synth.hpp"
#include "core/trainer.hpp"
#include "doctest.h"

using namespace survkit;

namespace {

Dataset bench(std::size_t n = 600, std::uint64_t seed = 5) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.dim_a = 6;
  cfg.dim_b = 3;
  cfg.seed = seed;
  return generate_synthetic(cfg);
}

}  // namespace

TEST_CASE("learning rate schedule hits the documented endpoints") {
  OptimConfig cfg;  // defaults: 2e-4 -> 1e-3 over 5 epochs, 60 total
  const int steps = 21;

  CHECK(lr_at(cfg, 0, 0, steps) == 2e-4);
  CHECK(lr_at(cfg, 5, 0, steps) == 1e-3);
  CHECK(lr_at(cfg, 59, steps - 1, steps) < 1e-6);

  // Continuous at the warmup boundary.
  CHECK(lr_at(cfg, 4, steps - 1, steps) == doctest::Approx(1e-3).epsilon(1e-2));

  // Non-increasing after warmup.
  double prev = lr_at(cfg, 5, 0, steps);
  for (int epoch = 5; epoch < 60; ++epoch) {
    for (int step = 0; step < steps; ++step) {
      const double lr = lr_at(cfg, epoch, step, steps);
      CHECK(lr <= prev + 1e-18);
      prev = lr;
    }
  }

  // Increasing during warmup.
  CHECK(lr_at(cfg, 2, 0, steps) > lr_at(cfg, 0, 0, steps));
  CHECK(lr_at(cfg, 2, 0, steps) < lr_at(cfg, 4, steps - 1, steps));
}

TEST_CASE("one step with zero momentum and decay is vanilla gradient descent") {
  const Dataset ds = bench(16);

  OptimConfig optim;
  optim.epochs = 1;
  optim.warmup_epochs = 0;
  optim.momentum = 0.0;
  optim.weight_decay = 0.0;
  optim.batch_size = 16;

  SamplerPolicy sampler;
  sampler.seed = 9;

  RiskModel model = init_model(3, 6, 3, {5}, {4}, {0.5, 0.5});
  const RiskModel initial = model;

  // Hand-computed single step on the same batch the sampler will draw.
  const auto batches = plan_epoch_batches(ds, sampler, optim.batch_size, 0);
  REQUIRE(batches.size() == 1);
  std::vector<double> bt, br;
  std::vector<int> be;
  for (std::size_t i : batches[0]) {
    bt.push_back(ds.records[i].time);
    be.push_back(ds.records[i].event);
  }
  ForwardCache cache;
  RiskModel manual = initial;
  const auto outputs = forward_batch(manual, ds, batches[0], cache);
  const LossOutput lo = eval_loss(LossId::Wci, bt, be, outputs, LossEvalConfig{});
  const ParameterGradients grads = backward(manual, cache, lo.grad);
  const double lr = lr_at(optim, 0, 0, 1);
  for (std::size_t l = 0; l < manual.head_a.weights.size(); ++l) {
    for (std::size_t k = 0; k < manual.head_a.weights[l].size(); ++k)
      manual.head_a.weights[l][k] -= lr * grads.head_a.weights[l][k];
    for (std::size_t k = 0; k < manual.head_a.biases[l].size(); ++k)
      manual.head_a.biases[l][k] -= lr * grads.head_a.biases[l][k];
  }
  for (std::size_t l = 0; l < manual.head_b.weights.size(); ++l) {
    for (std::size_t k = 0; k < manual.head_b.weights[l].size(); ++k)
      manual.head_b.weights[l][k] -= lr * grads.head_b.weights[l][k];
    for (std::size_t k = 0; k < manual.head_b.biases[l].size(); ++k)
      manual.head_b.biases[l][k] -= lr * grads.head_b.biases[l][k];
  }

  train(model, ds, Dataset{}, LossId::Wci, LossEvalConfig{}, optim, sampler);
  CHECK(model.head_a.weights == manual.head_a.weights);
  CHECK(model.head_a.biases == manual.head_a.biases);
  CHECK(model.head_b.weights == manual.head_b.weights);
  CHECK(model.head_b.biases == manual.head_b.biases);
}

TEST_CASE("zero epochs leaves the model untouched") {
  const Dataset ds = bench(80);
  OptimConfig optim;
  optim.epochs = 0;
  optim.warmup_epochs = 0;
  RiskModel model = init_model(1, 6, 3, {4}, {4}, {0.5, 0.5});
  const RiskModel before = model;
  const TrainResult res = train(model, ds, Dataset{}, LossId::Wci, LossEvalConfig{}, optim, SamplerPolicy{});
  CHECK(model == before);
  CHECK(res.report.epochs.empty());
  CHECK(res.report.batch_losses.empty());
}

TEST_CASE("training is deterministic for fixed seeds") {
  const Dataset ds = bench(320);
  const SplitResult parts = split(ds, 0.8, 0.2, 0.0, 1);

  OptimConfig optim;
  optim.epochs = 6;
  optim.warmup_epochs = 2;
  optim.batch_size = 32;

  auto run = [&] {
    RiskModel model = init_model(7, 6, 3, {8}, {6}, {0.5, 0.5});
    const TrainResult res =
        train(model, parts.train, parts.val, LossId::Wci, LossEvalConfig{}, optim, SamplerPolicy{});
    return std::make_pair(model, res);
  };
  const auto [model_1, res_1] = run();
  const auto [model_2, res_2] = run();
  CHECK(model_1 == model_2);
  CHECK(res_1.report.batch_losses == res_2.report.batch_losses);
  REQUIRE(res_1.report.epochs.size() == res_2.report.epochs.size());
  for (std::size_t e = 0; e < res_1.report.epochs.size(); ++e) {
    CHECK(res_1.report.epochs[e].train_loss_mean == res_2.report.epochs[e].train_loss_mean);
    CHECK(res_1.report.epochs[e].val_ci == res_2.report.epochs[e].val_ci);
  }
}

TEST_CASE("training reduces the wci loss on a learnable problem") {
  const Dataset ds = bench(600);
  OptimConfig optim;
  optim.epochs = 15;
  optim.warmup_epochs = 3;
  optim.batch_size = 64;
  RiskModel model = init_model(2, 6, 3, {16, 8}, {8}, {0.5, 0.5});
  const TrainResult res = train(model, ds, Dataset{}, LossId::Wci, LossEvalConfig{}, optim, SamplerPolicy{});
  REQUIRE(res.report.epochs.size() == 15);
  CHECK(res.report.epochs.back().train_loss_mean < res.report.epochs.front().train_loss_mean);
}

TEST_CASE("degenerate sampler raises a training error") {
  const Dataset ds = bench(160);
  OptimConfig optim;
  optim.epochs = 2;
  optim.warmup_epochs = 1;
  optim.batch_size = 32;
  SamplerPolicy sampler;
  sampler.kind = SamplerKind::Skewed;
  sampler.skew_min = 0;
  sampler.skew_max = 0;  // every batch is all-censored
  RiskModel model = init_model(3, 6, 3, {4}, {4}, {0.5, 0.5});
  CHECK_THROWS_WITH_AS(train(model, ds, Dataset{}, LossId::Wci, LossEvalConfig{}, optim, sampler),
                       doctest::Contains("degenerate sampler"), DataError);
}

TEST_CASE("uniform sampling covers every record exactly once per epoch") {
  const Dataset ds = bench(100);
  SamplerPolicy policy;
  policy.seed = 42;
  const auto batches = plan_epoch_batches(ds, policy, 32, 0);
  REQUIRE(batches.size() == 4);  // 32+32+32+4
  std::multiset<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  CHECK(seen.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) CHECK(seen.count(i) == 1);

  // Different epochs reshuffle.
  const auto epoch_1 = plan_epoch_batches(ds, policy, 32, 1);
  CHECK(batches[0] != epoch_1[0]);
}

TEST_CASE("skewed sampling respects the configured event range") {
  const Dataset ds = bench(400);
  SamplerPolicy policy;
  policy.kind = SamplerKind::Skewed;
  policy.skew_min = 1;
  policy.skew_max = 10;
  policy.seed = 8;
  std::set<int> counts_seen;
  for (int epoch = 0; epoch < 6; ++epoch) {
    for (const auto& batch : plan_epoch_batches(ds, policy, 32, epoch)) {
      CHECK(batch.size() == 32);
      int events = 0;
      for (std::size_t i : batch) events += ds.records[i].event;
      CHECK(events >= 1);
      CHECK(events <= 10);
      counts_seen.insert(events);
    }
  }
  CHECK(counts_seen.size() > 3);  // the range is actually exercised
}

TEST_CASE("split honors fractions, stratification and rounding") {
  const Dataset ds = bench(1000, 13);

  const SplitResult all_train = split(ds, 1.0, 0.0, 0.0, 3);
  CHECK(all_train.train.size() == 1000);
  CHECK(all_train.val.empty());
  CHECK(all_train.test.empty());

  const SplitResult parts = split(ds, 0.67, 0.12, 0.21, 3);
  CHECK(std::abs(static_cast<long>(parts.train.size()) - 670) <= 1);
  CHECK(std::abs(static_cast<long>(parts.val.size()) - 120) <= 1);
  CHECK(std::abs(static_cast<long>(parts.test.size()) - 210) <= 1);
  CHECK(parts.train.size() + parts.val.size() + parts.test.size() == 1000);

  // Disjoint ids.
  std::set<std::int64_t> ids;
  for (const auto* p : {&parts.train, &parts.val, &parts.test})
    for (const auto& r : p->records) CHECK(ids.insert(r.id).second);

  // Stratification: each part's event fraction within 2pp of the global one.
  const double global = event_fraction(ds);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SplitResult s = split(ds, 0.67, 0.12, 0.21, seed);
    for (const auto* p : {&s.train, &s.val, &s.test})
      CHECK(std::abs(event_fraction(*p) - global) <= 0.02);
  }

  // Reproducible.
  const SplitResult again = split(ds, 0.67, 0.12, 0.21, 3);
  CHECK(again.train == parts.train);
  CHECK(again.val == parts.val);
  CHECK(again.test == parts.test);

  CHECK_THROWS_AS(split(ds, 0.5, 0.2, 0.2, 3), ConfigError);
}

TEST_CASE("split fails when a requested part receives no events") {
  Dataset ds = bench(40, 2);
  for (auto& r : ds.records) r.event = 0;
  ds.records[0].event = 1;  // a single event cannot stratify three ways
  CHECK_THROWS_WITH_AS(split(ds, 0.4, 0.3, 0.3, 1), doctest::Contains("no events"), DataError);
}

TEST_CASE("optimizer config validation") {
  OptimConfig cfg;
  cfg.batch_size = 20;  // not a multiple of 8
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.batch_size = 64;
  cfg.warmup_epochs = 60;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.warmup_epochs = 5;
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}
