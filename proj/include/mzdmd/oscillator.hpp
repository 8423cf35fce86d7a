#ifndef MZDMD_OSCILLATOR_HPP
#define MZDMD_OSCILLATOR_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <utility>

#include "mzdmd/errors.hpp"
#include "mzdmd/models.hpp"
#include "mzdmd/random.hpp"

namespace mzdmd {

/// (y1, y2, y3, y4): positions and velocities of the two coupled oscillators.
using OscillatorState = Eigen::Vector4d;

/// Sampled time series; row k of `states` is the state at times[k].
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;

  Eigen::Index size() const { return times.size(); }
};

struct SimConfig {
  double dt = 0.1;
  double t_max = 50.0;
  int n_points = 501;
  double sigma = 1.0;
  int n_mc = 1000;
  std::uint64_t seed = 1234;
  int substeps = 10;

  void validate() const;
  Eigen::VectorXd time_grid() const;
};

/// y1' = y2, y2' = -y1 (1 + y3^2), y3' = y4, y4' = -y3 (1 + y1^2).
OscillatorState oscillator_rhs(const OscillatorState& s);

/// H = (y2^2 + y4^2)/2 + (y1^2 + y3^2 + y1^2 y3^2)/2, conserved by oscillator_rhs.
double oscillator_energy(const OscillatorState& s);

/// Classical RK4 with internal step dt / substeps, recording every grid point.
template <typename State, typename Rhs>
Trajectory integrate(Rhs&& rhs, const State& s0, const SimConfig& cfg, int substeps) {
  cfg.validate();
  if (substeps < 1) throw ShapeError("integrate: substeps must be at least 1");
  const Eigen::Index n = cfg.n_points;
  Trajectory traj{cfg.time_grid(), Eigen::MatrixXd(n, s0.size())};

  const double h = cfg.dt / substeps;
  State y = s0;
  traj.states.row(0) = y.transpose();
  for (Eigen::Index k = 1; k < n; ++k) {
    for (int sub = 0; sub < substeps; ++sub) {
      const State k1 = rhs(y);
      const State k2 = rhs(State(y + 0.5 * h * k1));
      const State k3 = rhs(State(y + 0.5 * h * k2));
      const State k4 = rhs(State(y + h * k3));
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!y.allFinite()) {
      throw DivergenceError("integrate: non-finite state", static_cast<std::size_t>(k));
    }
    traj.states.row(k) = y.transpose();
  }
  return traj;
}

Trajectory integrate_oscillator(const OscillatorState& s0, const SimConfig& cfg);

/// Two independent N(0, sigma^2) draws for the unresolved initial values.
std::pair<double, double> sample_unresolved(double sigma, Rng& rng);

/// The resolved coordinates (y1, y2) of a full trajectory.
Trajectory resolved_part(const Trajectory& full);

/// Snapshot pair over the resolved coordinates, ascending in time.
SnapshotPair measure(const Trajectory& traj);

/// One trajectory with the unresolved initial values drawn from the
/// measurement stream of cfg.seed.
Trajectory simulate_measurement(const SimConfig& cfg, const Eigen::Vector2d& x_hat);

struct ProjectionResult {
  Trajectory mean;      // resolved (y1, y2)
  Trajectory variance;  // population variance, 1/N
};

/// Averages n_mc integrations over sampled unresolved initial values with
/// the resolved ones fixed at x_hat.
ProjectionResult monte_carlo_projection(const SimConfig& cfg, const Eigen::Vector2d& x_hat,
                                        unsigned threads = 0);

}  // namespace mzdmd

#endif  // MZDMD_OSCILLATOR_HPP
