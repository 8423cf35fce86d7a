#include <doctest.h>

#include <cmath>
#include <limits>

#include "mzdmd/adam.hpp"
#include "mzdmd/oscillator.hpp"
#include "mzdmd/spectral.hpp"
#include "test_util.hpp"

using namespace mzdmd;
using test::random_matrix;

namespace {

RealMatrix scalar(double v) {
  RealMatrix m(1, 1);
  m << v;
  return m;
}

SnapshotPair default_measurement_snapshots() {
  SimConfig cfg;
  const Trajectory traj = simulate_measurement(cfg, Eigen::Vector2d(1.0, 0.0));
  return measure(traj);
}

}  // namespace

TEST_CASE("adam_step: zero gradient leaves parameters unchanged") {
  const AdamConfig cfg;
  const OptState s0 = OptState::start(RealMatrix::Ones(2, 2));
  const OptState s1 = adam_step(s0, RealMatrix::Zero(2, 2), cfg);
  CHECK(s1.params == s0.params);
  CHECK(s1.step_count == 1);
}

TEST_CASE("adam_step: first step on a scalar is about -lr") {
  const AdamConfig cfg;
  const OptState s1 = adam_step(OptState::start(scalar(0.0)), scalar(2.0), cfg);
  CHECK(s1.params(0, 0) == doctest::Approx(-1e-3 * 2.0 / (2.0 + 1e-8)).epsilon(1e-12));
  CHECK(s1.params(0, 0) == doctest::Approx(-1e-3).epsilon(1e-7));
}

TEST_CASE("adam_step: constant gradient moves at most lr per step") {
  const AdamConfig cfg;
  OptState s = OptState::start(scalar(0.5));
  for (int k = 0; k < 2; ++k) {
    const OptState next = adam_step(s, scalar(-0.7), cfg);
    CHECK(std::abs(next.params(0, 0) - s.params(0, 0)) <= cfg.learning_rate * (1.0 + 1e-9));
    s = next;
  }
}

TEST_CASE("adam_step: per-coordinate step bound under random gradients") {
  const AdamConfig cfg;
  Rng rng = test::rng(51);
  OptState s = OptState::start(RealMatrix::Zero(3, 3));
  const double bound = cfg.learning_rate / (1.0 - cfg.beta1) * (1.0 + 1e-9);
  for (int k = 0; k < 200; ++k) {
    const RealMatrix grad = random_matrix(rng, 3, 3, std::pow(10.0, (k % 7) - 3));
    const OptState next = adam_step(s, grad, cfg);
    CHECK((next.params - s.params).cwiseAbs().maxCoeff() <= bound);
    s = next;
  }
}

TEST_CASE("adam_step: shape mismatch") {
  CHECK_THROWS_AS(adam_step(OptState::start(RealMatrix::Zero(2, 2)), RealMatrix::Zero(3, 3), AdamConfig{}),
                  ShapeError);
}

TEST_CASE("AdamConfig: validation") {
  AdamConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ShapeError);
  cfg = AdamConfig{};
  cfg.beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ShapeError);
  cfg = AdamConfig{};
  cfg.beta2 = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ShapeError);
  cfg = AdamConfig{};
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ShapeError);
  cfg = AdamConfig{};
  cfg.iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), ShapeError);
}

TEST_CASE("fit_transition: stationary at the DMD fit for the plain objective") {
  const SnapshotPair s = default_measurement_snapshots();
  const RealMatrix a0 = dmd_fit(s);
  const AdamConfig cfg;
  const FitResult fit = fit_transition(Objective{ObjectiveKind::plain_dmd, s, {Eigen::Vector2d::Zero(), 0.0}}, a0, cfg);
  CHECK((fit.op - a0).cwiseAbs().maxCoeff() <= 5e-3);
  CHECK(fit.loss_trace.size() == static_cast<std::size_t>(cfg.iterations) + 1);
}

TEST_CASE("fit_transition: t-model loss is non-increasing on the default measurement") {
  const SnapshotPair s = default_measurement_snapshots();
  const RealMatrix a0 = dmd_fit(s);
  for (std::uint64_t i = 0; i < 5; ++i) {
    const Objective obj{ObjectiveKind::t_model, s, sample_memory(1.0, 2, 1234, i)};
    const FitResult fit = fit_transition(obj, a0, AdamConfig{});
    REQUIRE(fit.loss_trace.size() == 6);
    CHECK(fit.loss_trace.front() == doctest::Approx(objective_value(obj, a0)).epsilon(1e-14));
    for (std::size_t k = 1; k < fit.loss_trace.size(); ++k) {
      CHECK(fit.loss_trace[k] <= fit.loss_trace[k - 1] * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("fit_transition: zero memory reproduces the plain run and is deterministic") {
  Rng rng = test::rng(52);
  const SnapshotPair s = make_snapshots(random_matrix(rng, 2, 40), 0.1);
  const RealMatrix a0 = test::random_operator(rng, 2);
  const MemoryInit zero{Eigen::Vector2d::Zero(), 0.0};
  const FitResult plain = fit_transition(Objective{ObjectiveKind::plain_dmd, s, zero}, a0, AdamConfig{});
  const FitResult mz = fit_transition(Objective{ObjectiveKind::mz_dmd, s, zero}, a0, AdamConfig{});
  const FitResult t = fit_transition(Objective{ObjectiveKind::t_model, s, zero}, a0, AdamConfig{});
  CHECK(mz.op == plain.op);
  CHECK(t.op == plain.op);
  CHECK(mz.loss_trace == plain.loss_trace);

  const Objective obj{ObjectiveKind::mz_dmd, s, {Eigen::Vector2d(0.4, -1.1), 1.0}};
  const FitResult again1 = fit_transition(obj, a0, AdamConfig{});
  const FitResult again2 = fit_transition(obj, a0, AdamConfig{});
  CHECK(again1.op == again2.op);
  CHECK(again1.loss_trace == again2.loss_trace);
}

TEST_CASE("fit_transition: non-finite data raises a divergence error") {
  RealMatrix data = RealMatrix::Ones(2, 5);
  data(0, 3) = std::numeric_limits<double>::infinity();
  const SnapshotPair s = make_snapshots(data, 0.1);
  const Objective obj{ObjectiveKind::plain_dmd, s, {Eigen::Vector2d::Zero(), 0.0}};
  CHECK_THROWS_AS(fit_transition(obj, RealMatrix::Identity(2, 2) * 0.5, AdamConfig{}), DivergenceError);
  CHECK_THROWS_AS(fit_transition(obj, RealMatrix::Identity(3, 3), AdamConfig{}), ShapeError);
}
