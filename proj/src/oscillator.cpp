#include "mzdmd/oscillator.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "mzdmd/parallel.hpp"

namespace mzdmd {

namespace {

// Running mean / sum of squared deviations, merged with Chan's pairwise rule.
struct Moments {
  double count = 0.0;
  Eigen::ArrayXXd mean;
  Eigen::ArrayXXd m2;
};

Moments merge(const Moments& a, const Moments& b) {
  const double n = a.count + b.count;
  const Eigen::ArrayXXd delta = b.mean - a.mean;
  Moments out;
  out.count = n;
  out.mean = a.mean + delta * (b.count / n);
  out.m2 = a.m2 + b.m2 + delta.square() * (a.count * b.count / n);
  return out;
}

Moments reduce_range(const std::vector<Eigen::MatrixXd>& samples, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) {
    const Eigen::ArrayXXd x = samples[lo].array();
    return {1.0, x, Eigen::ArrayXXd::Zero(x.rows(), x.cols())};
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return merge(reduce_range(samples, lo, mid), reduce_range(samples, mid, hi));
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ShapeError("sim: dt must be positive");
  if (n_points < 2) throw ShapeError("sim: n_points must be at least 2");
  if (std::abs(dt * (n_points - 1) - t_max) > 1e-12 * std::max(1.0, std::abs(t_max))) {
    throw ShapeError("sim: dt * (n_points - 1) must equal t_max");
  }
  if (!(sigma >= 0.0)) throw ShapeError("sim: sigma must be non-negative");
  if (n_mc < 1) throw ShapeError("sim: n_mc must be at least 1");
  if (substeps < 1) throw ShapeError("sim: substeps must be at least 1");
}

Eigen::VectorXd SimConfig::time_grid() const {
  Eigen::VectorXd t(n_points);
  for (int k = 0; k < n_points; ++k) t(k) = static_cast<double>(k) * dt;
  return t;
}

OscillatorState oscillator_rhs(const OscillatorState& s) {
  return {s(1), -s(0) * (1.0 + s(2) * s(2)), s(3), -s(2) * (1.0 + s(0) * s(0))};
}

double oscillator_energy(const OscillatorState& s) {
  return 0.5 * (s(1) * s(1) + s(3) * s(3)) +
         0.5 * (s(0) * s(0) + s(2) * s(2) + s(0) * s(0) * s(2) * s(2));
}

Trajectory integrate_oscillator(const OscillatorState& s0, const SimConfig& cfg) {
  return integrate(oscillator_rhs, s0, cfg, cfg.substeps);
}

std::pair<double, double> sample_unresolved(double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ShapeError("sample_unresolved: sigma must be non-negative");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = normal(rng);
  const double b = normal(rng);
  return {sigma * a, sigma * b};
}

Trajectory resolved_part(const Trajectory& full) {
  if (full.states.cols() < 2) throw ShapeError("resolved_part: need at least two state columns");
  return {full.times, full.states.leftCols(2)};
}

SnapshotPair measure(const Trajectory& traj) {
  if (traj.size() < 2) throw ShapeError("measure: need at least two time points");
  if (traj.size() > 1 && !(traj.times(1) > traj.times(0))) {
    throw ShapeError("measure: times must increase");
  }
  const Eigen::MatrixXd data = traj.states.leftCols(2).transpose();
  return make_snapshots(data, traj.times(1) - traj.times(0));
}

Trajectory simulate_measurement(const SimConfig& cfg, const Eigen::Vector2d& x_hat) {
  cfg.validate();
  Rng rng = make_stream(cfg.seed, StreamDomain::measurement, 0);
  const auto [y3, y4] = sample_unresolved(cfg.sigma, rng);
  return integrate_oscillator(OscillatorState(x_hat(0), x_hat(1), y3, y4), cfg);
}

ProjectionResult monte_carlo_projection(const SimConfig& cfg, const Eigen::Vector2d& x_hat,
                                        unsigned threads) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_mc);
  std::vector<Eigen::MatrixXd> samples(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng = make_stream(cfg.seed, StreamDomain::projection, i);
    const auto [y3, y4] = sample_unresolved(cfg.sigma, rng);
    samples[i] = integrate_oscillator(OscillatorState(x_hat(0), x_hat(1), y3, y4), cfg).states.leftCols(2);
  });

  const Moments m = reduce_range(samples, 0, n);
  const Eigen::VectorXd times = cfg.time_grid();
  return {{times, m.mean.matrix()}, {times, (m.m2 / m.count).matrix()}};
}

}  // namespace mzdmd
