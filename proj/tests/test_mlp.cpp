// Copyright 2026 The Timbre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "timbre/error.hpp"
#include "timbre/mlp.hpp"

using namespace timbre;
using namespace timbre::testing;

namespace {

// Class c lights up inputs 6c..6c+5; optional label remap for adversarial sets.
LabeledSet block_patterns(std::uint64_t seed, int per_class, int classes,
                          int label_shift = 0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> noise(0.0, 0.1);
  LabeledSet set;
  std::vector<double> x(kInputs);
  for (int c = 0; c < classes; ++c) {
    for (int n = 0; n < per_class; ++n) {
      for (auto& v : x) v = noise(gen);
      for (int i = 6 * c; i < 6 * c + 6; ++i) x[static_cast<std::size_t>(i)] += 0.9;
      set.add(x, (c + label_shift) % classes);
    }
  }
  return set;
}

double train_accuracy(const MlpModel& m, const LabeledSet& set) {
  return evaluate(m, set).accuracy();
}

}  // namespace

TEST_CASE("forward") {
  const auto zero = MlpModel::zeros(kDefaultHidden, 0.07);
  const std::vector<double> x(kInputs, 0.3);
  for (const double p : forward(zero, x)) CHECK(p == doctest::Approx(0.125));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = random_model(seed, 2.0);
    const auto batch = random_batch(seed + 100, 1);
    const auto p = forward(m, batch.row(0));
    double sum = 0.0;
    for (const double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);

    auto swapped = m;
    const auto stride = swapped.output.stride();
    std::swap_ranges(swapped.output.weights.begin() + 2 * stride,
                     swapped.output.weights.begin() + 3 * stride,
                     swapped.output.weights.begin() + 5 * stride);
    const auto q = forward(swapped, batch.row(0));
    CHECK(q[2] == doctest::Approx(p[5]));
    CHECK(q[5] == doctest::Approx(p[2]));
    CHECK(q[0] == doctest::Approx(p[0]));
  }
  CHECK_THROWS_AS(forward(zero, std::vector<double>(49, 0.0)), Error);
}

TEST_CASE("loss_and_gradient") {
  SUBCASE("uniform prediction") {
    const auto zero = MlpModel::zeros(kDefaultHidden, 0.07);
    const auto [l, g] = loss_and_gradient(zero, random_batch(1, 1));
    CHECK(l == doctest::Approx(std::log(8.0)));
  }
  SUBCASE("matches central differences") {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto m = random_model(10 + s);
      const auto batch = random_batch(20 + s, 30);
      const auto [l, g] = loss_and_gradient(m, batch);
      CHECK(l == doctest::Approx(loss(m, batch)).epsilon(1e-12));
      const auto fd = finite_difference_gradient(m, batch, 1e-5);
      CHECK(gradient_relative_error(g, fd) <= 1e-4);
    }
  }
  SUBCASE("duplicated batch") {
    const auto m = random_model(3);
    const auto batch = random_batch(4, 12);
    LabeledSet doubled;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      doubled.add(batch.row(i), batch.targets[i]);
      doubled.add(batch.row(i), batch.targets[i]);
    }
    const auto [l1, g1] = loss_and_gradient(m, batch);
    const auto [l2, g2] = loss_and_gradient(m, doubled);
    CHECK(l2 == doctest::Approx(l1).epsilon(1e-12));
    CHECK(gradient_relative_error(g1, g2, 1e-12) <= 1e-9);
  }
  SUBCASE("empty batch") {
    try {
      loss_and_gradient(MlpModel::zeros(4, 0.1), LabeledSet{});
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyBatch);
    }
  }
}

TEST_CASE("rprop_update branches") {
  const RpropParams params{0.1, 1e-6, 50.0, 1.2, 0.5};

  SUBCASE("first positive gradient moves down by the step") {
    std::vector<double> w{0.5}, step{0.1}, grad{2.7};
    std::vector<std::int8_t> prev{0};
    rprop_update(w, step, prev, grad, params);
    CHECK(w[0] == doctest::Approx(0.4));
    CHECK(step[0] == 0.1);
  }
  SUBCASE("zero gradient is a no-op") {
    std::vector<double> w{0.5}, step{0.1}, grad{0.0};
    std::vector<std::int8_t> prev{1};
    rprop_update(w, step, prev, grad, params);
    CHECK(w[0] == 0.5);
    CHECK(step[0] == 0.1);
  }
  SUBCASE("three weight trace") {
    // Worked by hand with eta+ = 1.2, eta- = 0.5, delta0 = 0.1.
    std::vector<double> w{0.5, -0.2, 1.0}, step(3, 0.1);
    std::vector<std::int8_t> prev(3, 0);
    rprop_update(w, step, prev, std::vector<double>{2.7, -0.003, 0.0}, params);
    CHECK(w[0] == doctest::Approx(0.4));
    CHECK(w[1] == doctest::Approx(-0.1));
    CHECK(w[2] == 1.0);

    rprop_update(w, step, prev, std::vector<double>{1.0, 5.0, -4.0}, params);
    CHECK(w[0] == doctest::Approx(0.28));  // same sign: step 0.12
    CHECK(w[1] == doctest::Approx(-0.1));  // flip: no move, step 0.05
    CHECK(step[1] == doctest::Approx(0.05));
    CHECK(prev[1] == 0);
    CHECK(w[2] == doctest::Approx(1.1));

    rprop_update(w, step, prev, std::vector<double>{-0.5, 5.0, -1e-9}, params);
    CHECK(w[0] == doctest::Approx(0.28));
    CHECK(step[0] == doctest::Approx(0.06));
    CHECK(w[1] == doctest::Approx(-0.15));  // forgotten sign: plain move
    CHECK(w[2] == doctest::Approx(1.22));
  }
  SUBCASE("step bounds") {
    std::vector<double> w{0.0}, step{40.0};
    std::vector<std::int8_t> prev{1};
    rprop_update(w, step, prev, std::vector<double>{1.0}, params);
    CHECK(step[0] == 48.0);
    rprop_update(w, step, prev, std::vector<double>{1.0}, params);
    CHECK(step[0] == 50.0);
    std::vector<double> tiny{1.5e-6};
    prev[0] = 1;
    rprop_update(w, tiny, prev, std::vector<double>{-1.0}, params);
    CHECK(tiny[0] == 1e-6);
  }
  SUBCASE("shape mismatch") {
    std::vector<double> w{0.0, 1.0}, step{0.1};
    std::vector<std::int8_t> prev{0, 0};
    CHECK_THROWS_AS(rprop_update(w, step, prev, std::vector<double>{1.0, 1.0}, params), Error);
    CHECK_THROWS_AS(rprop_step(MlpModel::zeros(4, 0.1), Gradients{}, params), Error);
  }
}

TEST_CASE("rprop depends on gradient signs only") {
  const RpropParams params{};
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto m = random_model(40 + s);
    const auto batch = random_batch(50 + s, 16);
    auto [l, g] = loss_and_gradient(m, batch);
    Gradients scaled = g;
    for (auto& v : scaled.hidden) v *= 1000.0;
    for (auto& v : scaled.output) v *= 1000.0;

    auto a = m, b = m;
    for (int step = 0; step < 3; ++step) {
      a = rprop_step(a, g, params);
      b = rprop_step(b, scaled, params);
    }
    CHECK(a == b);

    const auto once = rprop_step(m, g, params);
    for (std::size_t i = 0; i < m.hidden.weights.size(); ++i) {
      const double moved = std::abs(once.hidden.weights[i] - m.hidden.weights[i]);
      if (g.hidden[i] != 0.0) CHECK(moved == doctest::Approx(m.step_hidden[i]).epsilon(1e-12));
      else CHECK(moved == 0.0);
    }
  }
}

TEST_CASE("train_early_stopping") {
  TrainConfig cfg;
  cfg.seed = 5;

  SUBCASE("separable toy problem") {
    const auto train = block_patterns(1, 10, 2);
    const auto out = train_early_stopping(train, train, cfg);
    CHECK(train_accuracy(out.model, train) == 1.0);
    CHECK(out.epochs_run <= 500);
  }
  SUBCASE("validation that only gets worse") {
    const auto train = block_patterns(2, 5, kOutputs);
    const auto validation = block_patterns(2, 5, kOutputs, 1);
    const auto out = train_early_stopping(train, validation, cfg);
    CHECK(out.best_epoch <= 1);
    CHECK(out.epochs_run <= 151);
    CHECK(out.epochs_run == out.best_epoch + cfg.max_fail);
  }
  SUBCASE("curve bookkeeping") {
    const auto train = block_patterns(3, 6, kOutputs);
    const auto validation = block_patterns(4, 2, kOutputs);
    const auto out = train_early_stopping(train, validation, cfg);
    CHECK(out.train_error_curve.size() == static_cast<std::size_t>(out.epochs_run) + 1);
    CHECK(out.validation_error_curve.size() == out.train_error_curve.size());
    const double best = *std::min_element(out.validation_error_curve.begin(),
                                          out.validation_error_curve.end());
    CHECK(out.validation_error_curve[static_cast<std::size_t>(out.best_epoch)] == best);
    CHECK(loss(out.model, validation) == best);
    CHECK(out.epochs_run <= std::min(500, out.best_epoch + cfg.max_fail + 1));
    for (const double s : out.model.step_hidden) {
      CHECK(s >= cfg.rprop.delta_min);
      CHECK(s <= cfg.rprop.delta_max);
    }

    const auto again = train_early_stopping(train, validation, cfg);
    CHECK(again.model == out.model);
    CHECK(again.validation_error_curve == out.validation_error_curve);
  }
  SUBCASE("epoch cap") {
    TrainConfig capped = cfg;
    capped.max_epochs = 7;
    const auto train = block_patterns(3, 3, kOutputs);
    CHECK(train_early_stopping(train, train, capped).epochs_run == 7);
  }
  SUBCASE("bad configuration") {
    TrainConfig bad = cfg;
    bad.rprop.eta_minus = 1.5;
    CHECK_THROWS_AS(train_early_stopping(block_patterns(1, 3, 2), block_patterns(1, 3, 2), bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(train_early_stopping(LabeledSet{}, block_patterns(1, 3, 2), cfg), Error);
  }
}

TEST_CASE("evaluate") {
  // Output threshold for class 0 very negative => class 0 always wins.
  auto m = MlpModel::zeros(kDefaultHidden, 0.07);
  m.output.threshold(0) = -5.0;

  LabeledSet all_first;
  const std::vector<double> x(kInputs, 0.5);
  for (int n = 0; n < 7; ++n) all_first.add(x, 0);
  const auto cm = evaluate(m, all_first);
  CHECK(cm.accuracy() == 1.0);
  CHECK(cm.counts[0][0] == 7);
  CHECK(cm.total() == 7);

  LabeledSet spread;
  for (int c = 0; c < kOutputs; ++c)
    for (int n = 0; n < 3; ++n) spread.add(x, c);
  const auto cm2 = evaluate(m, spread);
  CHECK(cm2.accuracy() == 0.125);
  for (int c = 0; c < kOutputs; ++c) CHECK(cm2.row_total(c) == 3);

  // All-zero model: every score ties, lowest index wins.
  const auto tie = evaluate(MlpModel::zeros(kDefaultHidden, 0.07), spread);
  CHECK(tie.counts[3][0] == 3);

  CHECK_THROWS_AS(evaluate(m, LabeledSet{}), Error);
}

TEST_CASE("model json round trip") {
  TrainConfig cfg;
  cfg.seed = 99;
  cfg.max_fail = 42;
  auto m = MlpModel::random(kDefaultHidden, 0.07, 17);
  const auto batch = random_batch(1, 10);
  m = rprop_step(m, loss_and_gradient(m, batch).second, cfg.rprop);
  m = rprop_step(m, loss_and_gradient(m, batch).second, cfg.rprop);

  const auto text = model_to_json(m, cfg);
  const auto [back, back_cfg] = model_from_json(text);
  CHECK(back == m);
  CHECK(back_cfg.seed == 99);
  CHECK(back_cfg.max_fail == 42);
  CHECK(back_cfg.rprop.delta0 == cfg.rprop.delta0);
  CHECK(text.find("cross_entropy") != std::string::npos);

  CHECK_THROWS_AS(model_from_json("{\"format\": \"other\"}"), Error);
  CHECK_THROWS_AS(model_from_json("not json"), Error);
}
