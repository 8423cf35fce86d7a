#include "mzdmd/memory_kernel.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "mzdmd/errors.hpp"

namespace mzdmd {

namespace {

using cd = std::complex<double>;

constexpr double kPivotFloor = 1e-12;

void require_inputs(const Eigen::VectorXcd& lambda, const Eigen::VectorXcd& m0, int steps, double dt) {
  if (lambda.size() != m0.size()) throw ShapeError("memory kernel: lambda and M0 differ in length");
  if (steps < 0) throw ShapeError("memory kernel: negative step count");
  if (!(dt > 0.0)) throw ShapeError("memory kernel: dt must be positive");
}

// Diagonal of (I + dt/2 Lambda), refusing near-zero entries.
Eigen::VectorXcd half_step_denominator(const Eigen::VectorXcd& lambda, double dt) {
  Eigen::VectorXcd den = Eigen::VectorXcd::Ones(lambda.size()) + (0.5 * dt) * lambda;
  for (Eigen::Index i = 0; i < den.size(); ++i) {
    if (std::abs(den(i)) < kPivotFloor) {
      throw SingularityError("memory kernel: I + dt/2 Lambda is singular",
                             std::numeric_limits<double>::infinity());
    }
  }
  return den;
}

}  // namespace

Eigen::VectorXcd memory_cayley_diagonal(const Eigen::VectorXcd& lambda, double dt) {
  const Eigen::VectorXcd den = half_step_denominator(lambda, dt);
  return Eigen::VectorXcd::Ones(lambda.size()) - (dt * lambda).cwiseQuotient(den);
}

std::vector<Eigen::VectorXcd> memory_kernel_closed(const Eigen::VectorXcd& lambda,
                                                   const Eigen::VectorXcd& m0, int steps, double dt) {
  require_inputs(lambda, m0, steps, dt);
  const Eigen::VectorXcd factor =
      (dt * lambda).array().exp().matrix().cwiseProduct(memory_cayley_diagonal(lambda, dt));

  std::vector<Eigen::VectorXcd> out;
  out.reserve(static_cast<std::size_t>(steps));
  Eigen::VectorXcd current = m0;
  for (int n = 1; n <= steps; ++n) {
    current = factor.cwiseProduct(current);
    out.push_back(current);
  }
  return out;
}

std::vector<Eigen::VectorXcd> memory_kernel_trapezoid(const Eigen::VectorXcd& lambda,
                                                      const Eigen::VectorXcd& m0, int steps,
                                                      double dt) {
  require_inputs(lambda, m0, steps, dt);
  const Eigen::Index d = lambda.size();
  const Eigen::VectorXcd den = half_step_denominator(lambda, dt);
  const Eigen::VectorXcd half_minus = Eigen::VectorXcd::Ones(d) - (0.5 * dt) * lambda;

  // history[k] = M_k, with history[0] = M_0.
  std::vector<Eigen::VectorXcd> history;
  history.reserve(static_cast<std::size_t>(steps) + 1);
  history.push_back(m0);
  for (int n = 1; n <= steps; ++n) {
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(d);
    for (int k = 1; k <= n - 1; ++k) {
      const Eigen::VectorXcd decay = (static_cast<double>(n - k) * dt * lambda).array().exp().matrix();
      sum += decay.cwiseProduct(history[static_cast<std::size_t>(k)]);
    }
    const Eigen::VectorXcd lead = (static_cast<double>(n) * dt * lambda).array().exp().matrix();
    const Eigen::VectorXcd rhs =
        lead.cwiseProduct(half_minus).cwiseProduct(m0) - dt * lambda.cwiseProduct(sum);
    history.push_back(rhs.cwiseQuotient(den));
  }
  history.erase(history.begin());
  return history;
}

Eigen::VectorXcd memory_power_sum(const Eigen::VectorXcd& lambda, double dt, int n) {
  if (n < 1) throw ShapeError("memory_power_sum: n must be at least 1");
  const Eigen::VectorXcd m = memory_cayley_diagonal(lambda, dt);
  const Eigen::Index d = lambda.size();
  Eigen::VectorXcd sum = Eigen::VectorXcd::Ones(d);
  Eigen::VectorXcd power = Eigen::VectorXcd::Ones(d);
  for (int k = 1; k <= n - 1; ++k) {
    power = power.cwiseProduct(m);
    sum += 2.0 * power;
  }
  power = power.cwiseProduct(m);
  return sum + power;
}

Eigen::VectorXcd memory_power_sum_telescoped(const Eigen::VectorXcd& lambda, double dt, int n) {
  if (n < 1) throw ShapeError("memory_power_sum_telescoped: n must be at least 1");
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) == cd(0.0, 0.0)) {
      throw SingularityError("memory_power_sum_telescoped: Lambda has a zero entry",
                             std::numeric_limits<double>::infinity());
    }
  }
  const Eigen::VectorXcd m = memory_cayley_diagonal(lambda, dt);
  Eigen::VectorXcd mn = Eigen::VectorXcd::Ones(lambda.size());
  for (int k = 0; k < n; ++k) mn = mn.cwiseProduct(m);
  const Eigen::VectorXcd scale = (-2.0 / dt) * lambda.cwiseInverse();
  return (mn - Eigen::VectorXcd::Ones(lambda.size())).cwiseProduct(scale);
}

}  // namespace mzdmd
