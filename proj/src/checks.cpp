#include "mzdmd/checks.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "mzdmd/linalg.hpp"
#include "mzdmd/memory_kernel.hpp"
#include "mzdmd/models.hpp"
#include "mzdmd/oscillator.hpp"
#include "mzdmd/random.hpp"

namespace mzdmd {

namespace {

RealMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  RealMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

CheckResult check_max(std::string name, double observed, double bound) {
  return {std::move(name), observed <= bound, "max error " + sci(observed) + " (bound " + sci(bound) + ")"};
}

// Transition operator near a slow rotation, keeping A - I and A + I invertible.
RealMatrix random_operator(Rng& rng, Eigen::Index d) {
  const RealMatrix id = RealMatrix::Identity(d, d);
  return 0.6 * id + random_matrix(rng, d, d, 0.25 / std::sqrt(static_cast<double>(d)));
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(std::uint64_t seed) {
  Rng rng = make_stream(seed, StreamDomain::test, 0);
  std::vector<CheckResult> out;

  {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const RealMatrix m = random_matrix(rng, 4 + trial % 5, 3 + trial % 4, 1.0);
      const RealMatrix p = pinv(m);
      worst = std::max({worst, (m * p * m - m).norm(), (p * m * p - p).norm(),
                        (m * p - (m * p).transpose()).norm(), (p * m - (p * m).transpose()).norm()});
    }
    out.push_back(check_max("pinv Penrose conditions", worst, 1e-10));
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      RealMatrix a = random_matrix(rng, 4, 4, 1.0);
      a *= 5.0 / a.norm();
      const RealMatrix prod = expm<double>(a) * expm<double>(RealMatrix(-a));
      worst = std::max(worst, (prod - RealMatrix::Identity(4, 4)).norm());
    }
    out.push_back(check_max("expm(A) expm(-A) = I", worst, 1e-10));
  }

  {
    double worst = 0.0;
    const double h = 1e-6;
    for (int trial = 0; trial < 5; ++trial) {
      const RealMatrix a = random_matrix(rng, 3, 3, 0.5);
      const RealMatrix e = random_matrix(rng, 3, 3, 1.0);
      const RealMatrix l = expm_frechet<double>(a, e).derivative;
      const RealMatrix fd =
          (expm<double>(RealMatrix(a + h * e)) - expm<double>(RealMatrix(a - h * e))) / (2.0 * h);
      worst = std::max(worst, (l - fd).norm() / fd.norm());
    }
    out.push_back(check_max("expm Frechet derivative vs central differences", worst, 1e-6));
  }

  for (ObjectiveKind kind : {ObjectiveKind::plain_dmd, ObjectiveKind::mz_dmd, ObjectiveKind::t_model}) {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::Index d = trial < 4 ? 2 : 4;
      const RealMatrix data = random_matrix(rng, d, 12, 1.0);
      Objective obj{kind, make_snapshots(data, 0.1), {random_matrix(rng, d, 1, 1.0), 1.0}};
      const RealMatrix a = random_operator(rng, d);
      const RealMatrix g = objective_gradient(obj, a);
      const RealMatrix fd = fd_gradient(obj, a, 1e-6);
      worst = std::max(worst, (g - fd).norm() / std::max(fd.norm(), 1e-300));
    }
    out.push_back(check_max(std::string("gradient vs central differences: ") + std::string(to_string(kind)),
                            worst, 1e-5));
  }

  {
    double worst = 0.0;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXcd lambda(4), m0(4);
      for (int i = 0; i < 4; ++i) {
        lambda(i) = {-std::abs(normal(rng)), normal(rng)};
        m0(i) = {normal(rng), normal(rng)};
      }
      const auto closed = memory_kernel_closed(lambda, m0, 50, 0.1);
      const auto direct = memory_kernel_trapezoid(lambda, m0, 50, 0.1);
      for (std::size_t k = 0; k < closed.size(); ++k) worst = std::max(worst, (closed[k] - direct[k]).cwiseAbs().maxCoeff());
    }
    out.push_back(check_max("memory kernel recursion vs trapezoid", worst, 1e-10));
  }

  {
    double worst = 0.0;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXcd lambda(4);
      for (int i = 0; i < 4; ++i) lambda(i) = {-std::abs(normal(rng)), normal(rng)};
      for (int n = 1; n <= 50; ++n) {
        const Eigen::VectorXcd lhs = memory_power_sum(lambda, 0.1, n);
        const Eigen::VectorXcd rhs = memory_power_sum_telescoped(lambda, 0.1, n);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
    out.push_back(check_max("telescoped memory sum", worst, 1e-10));
  }

  {
    SimConfig sim;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const auto [y3, y4] = sample_unresolved(1.0, rng);
      const OscillatorState s0(1.0, 0.0, y3, y4);
      const Trajectory t = integrate_oscillator(s0, sim);
      const double h0 = oscillator_energy(s0);
      for (Eigen::Index k = 0; k < t.size(); ++k) {
        const OscillatorState s = t.states.row(k).transpose();
        worst = std::max(worst, std::abs(oscillator_energy(s) - h0) / h0);
      }
    }
    out.push_back(check_max("oscillator energy drift", worst, 1e-6));
  }

  {
    const double c = std::cos(0.1), s = std::sin(0.1);
    RealMatrix rot(2, 2);
    rot << c, -s, s, c;
    RealMatrix data(2, 50);
    data.col(0) << 1.0, 0.0;
    for (int k = 1; k < 50; ++k) data.col(k) = rot * data.col(k - 1);
    const RealMatrix fitted = dmd_fit(make_snapshots(data, 0.1));
    out.push_back(check_max("DMD recovers a rotation", (fitted - rot).norm(), 1e-8));
  }

  return out;
}

}  // namespace mzdmd
