#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "mzdmd/spectral.hpp"
#include "test_util.hpp"

using namespace mzdmd;
using cd = std::complex<double>;
using test::random_matrix;

namespace {

SpectralModel diagonal_model(std::initializer_list<cd> values, double dt = 0.1) {
  SpectralModel m;
  m.values = Eigen::VectorXcd(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const cd v : values) m.values(i++) = v;
  m.vectors = ComplexMatrix::Identity(m.dim(), m.dim());
  m.dt = dt;
  return m;
}

SpectralModel permuted(const SpectralModel& m, const std::vector<Eigen::Index>& perm) {
  SpectralModel out = m;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    out.values(Eigen::Index(k)) = m.values(perm[k]);
    out.vectors.col(Eigen::Index(k)) = m.vectors.col(perm[k]);
  }
  return out;
}

double nearest(const Eigen::VectorXcd& values, cd target) {
  double best = 1e300;
  for (Eigen::Index i = 0; i < values.size(); ++i) best = std::min(best, std::abs(values(i) - target));
  return best;
}

SnapshotPair short_measurement(double sigma = 1.0) {
  SimConfig cfg;
  cfg.sigma = sigma;
  cfg.t_max = 20.0;
  cfg.n_points = 201;
  return measure(simulate_measurement(cfg, Eigen::Vector2d(1.0, 0.0)));
}

}  // namespace

TEST_CASE("sample_memory: zero sigma and reproducibility") {
  CHECK(sample_memory(0.0, 2, 7, 3).n.norm() == 0.0);
  CHECK(sample_memory(1.0, 2, 7, 3).n == sample_memory(1.0, 2, 7, 3).n);
  CHECK(sample_memory(1.0, 2, 7, 3).n != sample_memory(1.0, 2, 7, 4).n);
  CHECK_THROWS_AS(sample_memory(-1.0, 2, 7, 3), ShapeError);
}

TEST_CASE("fit_ensemble: zero sigma gives the plain DMD spectrum for every sample") {
  const SnapshotPair s = short_measurement();
  const SpectralModel dmd = spectral_model(dmd_fit(s), s.dt);
  for (const auto kind : {ObjectiveKind::mz_dmd, ObjectiveKind::t_model}) {
    const EnsembleFit fit = fit_ensemble(kind, s, 0.0, 4, AdamConfig{}, 99, 2);
    REQUIRE(fit.models.size() == 4);
    for (std::size_t i = 0; i < fit.models.size(); ++i) {
      CHECK(fit.operators[i] == dmd_fit(s));
      CHECK(fit.models[i].values == dmd.values);
      CHECK(fit.models[i].vectors == dmd.vectors);
    }
  }
}

TEST_CASE("fit_ensemble: independent of the thread count") {
  const SnapshotPair s = short_measurement();
  const EnsembleFit a = fit_ensemble(ObjectiveKind::mz_dmd, s, 1.0, 6, AdamConfig{}, 5, 1);
  const EnsembleFit b = fit_ensemble(ObjectiveKind::mz_dmd, s, 1.0, 6, AdamConfig{}, 5, 4);
  for (std::size_t i = 0; i < a.operators.size(); ++i) CHECK(a.operators[i] == b.operators[i]);
  CHECK_THROWS_AS(fit_ensemble(ObjectiveKind::mz_dmd, s, 1.0, 0, AdamConfig{}, 5, 1), ShapeError);
}

TEST_CASE("match_and_average: a single model and identical copies are returned unchanged") {
  Rng rng = test::rng(71);
  const SpectralModel m = spectral_model(test::random_operator(rng, 3), 0.1);
  const AveragedSpectrum one = match_and_average({m});
  CHECK((one.model.values - m.values).norm() <= 1e-15);
  CHECK((one.model.vectors - m.vectors).norm() <= 1e-14);

  const AveragedSpectrum many = match_and_average({m, m, m, m});
  CHECK((many.model.values - m.values).norm() <= 1e-15);
  CHECK((many.model.vectors - m.vectors).norm() <= 1e-14);
}

TEST_CASE("match_and_average: permuted eigenpairs are matched back") {
  const SpectralModel ref = diagonal_model({cd(0.9, 0.1), cd(0.9, -0.1), cd(0.5, 0.0)});
  const SpectralModel shuffled = permuted(ref, {2, 0, 1});
  const AveragedSpectrum avg = match_and_average({ref, shuffled});
  CHECK((avg.model.values - ref.values).norm() <= 1e-15);
  CHECK((avg.model.vectors - ref.vectors).norm() <= 1e-15);
}

TEST_CASE("match_and_average: averaging perturbed copies recovers the spectrum") {
  const SpectralModel base = diagonal_model({cd(0.95, 0.2), cd(0.95, -0.2)});
  Rng rng = test::rng(72);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  std::vector<SpectralModel> copies;
  for (int i = 0; i < 100; ++i) {
    SpectralModel m = base;
    for (Eigen::Index k = 0; k < m.dim(); ++k) m.values(k) += cd(u(rng), u(rng));
    copies.push_back(i % 2 == 0 ? m : permuted(m, {1, 0}));
  }
  const AveragedSpectrum avg = match_and_average(copies);
  for (Eigen::Index k = 0; k < base.dim(); ++k) CHECK(std::abs(avg.model.values(k) - base.values(k)) <= 2e-4);
}

TEST_CASE("match_and_average: conjugate symmetry of real operators is preserved") {
  Rng rng = test::rng(73);
  const RealMatrix a = test::rotation(0.4) * 0.97;
  std::vector<SpectralModel> models;
  for (int i = 0; i < 20; ++i) models.push_back(spectral_model(RealMatrix(a + random_matrix(rng, 2, 2, 1e-3)), 0.1));
  const AveragedSpectrum avg = match_and_average(models);
  for (Eigen::Index k = 0; k < 2; ++k) CHECK(nearest(avg.model.values, std::conj(avg.model.values(k))) <= 1e-10);
}

TEST_CASE("match_and_average: order of non-reference models does not matter") {
  Rng rng = test::rng(74);
  const RealMatrix a = test::random_operator(rng, 3);
  std::vector<SpectralModel> models;
  for (int i = 0; i < 12; ++i) models.push_back(spectral_model(RealMatrix(a + random_matrix(rng, 3, 3, 1e-2)), 0.1));
  std::vector<SpectralModel> reordered = models;
  std::reverse(reordered.begin() + 1, reordered.end());
  const AveragedSpectrum x = match_and_average(models);
  const AveragedSpectrum y = match_and_average(reordered);
  CHECK((x.model.values - y.model.values).norm() <= 1e-12);
  CHECK((x.model.vectors - y.model.vectors).norm() <= 1e-12);
}

TEST_CASE("match_and_average: degenerate spectra are reported and bad input refused") {
  const SpectralModel repeated = diagonal_model({cd(1.0, 0.0), cd(1.0, 0.0)});
  const AveragedSpectrum avg = match_and_average({repeated, repeated});
  CHECK(avg.degenerate_matchings > 0);
  CHECK((avg.model.vectors - repeated.vectors).norm() <= 1e-15);

  CHECK_THROWS_AS(match_and_average({}), ShapeError);
  CHECK_THROWS_AS(match_and_average({repeated, diagonal_model({cd(1.0, 0.0)})}), ShapeError);
  CHECK_THROWS_AS(match_and_average({repeated, diagonal_model({cd(1.0, 0.0), cd(0.5, 0.0)}, 0.2)}), ShapeError);
}

TEST_CASE("reconstruct: closed-form cases") {
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(51, 0.0, 5.0);

  const Reconstruction flat = reconstruct(diagonal_model({cd(1.0, 0.0), cd(1.0, 0.0)}), Eigen::Vector2d(1.0, 0.0), times);
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    CHECK(std::abs(flat.traj.states(k, 0) - 1.0) <= 1e-15);
    CHECK(std::abs(flat.traj.states(k, 1)) <= 1e-15);
  }

  const Reconstruction decay = reconstruct(diagonal_model({cd(std::exp(-0.2 * 0.1), 0.0)}), Eigen::VectorXd::Ones(1), times);
  CHECK(decay.traj.states(50, 0) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  CHECK(std::abs(decay.traj.states(0, 0) - 1.0) <= 1e-10);
  CHECK_FALSE(decay.imag_warning);
}

TEST_CASE("reconstruct: unit-circle spectrum stays bounded and is real") {
  const SpectralModel m = spectral_model(test::rotation(0.1), 0.1);
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(501, 0.0, 50.0);
  const Reconstruction r = reconstruct(m, Eigen::Vector2d(1.0, 0.0), times);
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    CHECK(r.traj.states.row(k).norm() <= 1.0 + 1e-10);
    CHECK(std::abs(r.traj.states(k, 0) - std::cos(times(k))) <= 1e-10);
  }
  CHECK(r.max_imag <= 1e-12);
}

TEST_CASE("reconstruct: DMD of a rotation reproduces the samples") {
  const RealMatrix rot = test::rotation(0.3) * 0.99;
  const RealMatrix data = test::orbit(rot, Eigen::Vector2d(0.7, -0.2), 40);
  const SpectralModel m = spectral_model(dmd_fit(make_snapshots(data, 0.1)), 0.1);
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(40, 0.0, 3.9);
  const Reconstruction r = reconstruct(m, data.col(0), times);
  CHECK((r.traj.states.transpose() - data).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("reconstruct: branch and shape errors") {
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(3, 0.0, 0.2);
  CHECK_THROWS_AS(reconstruct(diagonal_model({cd(0.0, 0.0), cd(1.0, 0.0)}), Eigen::Vector2d(1, 1), times), BranchError);
  CHECK(reconstruct(diagonal_model({cd(-0.5, 0.0), cd(1.0, 0.0)}), Eigen::Vector2d(1, 1), times).negative_real_eigenvalue);
  CHECK_THROWS_AS(reconstruct(diagonal_model({cd(1.0, 0.0)}), Eigen::Vector2d(1, 1), times), ShapeError);

  SpectralModel singular = diagonal_model({cd(0.9, 0.0), cd(0.8, 0.0)});
  singular.vectors.col(1) = singular.vectors.col(0);
  CHECK_THROWS_AS(reconstruct(singular, Eigen::Vector2d(1, 1), times), SingularityError);
}

TEST_CASE("ensemble_variance: identical samples, symmetric pair and non-negativity") {
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(21, 0.0, 2.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  const SpectralModel m = diagonal_model({cd(0.97, 0.0)});
  const Trajectory mean = reconstruct(m, x0, times).traj;
  CHECK(ensemble_variance({m, m, m}, mean, x0, times).states.cwiseAbs().maxCoeff() == 0.0);

  const double a = 0.5;
  const SpectralModel up = diagonal_model({cd(std::exp(a * 0.1), 0.0)});
  const SpectralModel down = diagonal_model({cd(std::exp(-a * 0.1), 0.0)});
  Trajectory cosh_mean{times, Eigen::MatrixXd(times.size(), 1)};
  for (Eigen::Index k = 0; k < times.size(); ++k) cosh_mean.states(k, 0) = std::cosh(a * times(k));
  const Trajectory v = ensemble_variance({up, down}, cosh_mean, x0, times);
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    const double s = std::sinh(a * times(k));
    CHECK(std::abs(v.states(k, 0) - s * s) <= 1e-12 * std::max(1.0, s * s));
  }

  Rng rng = test::rng(75);
  std::vector<SpectralModel> samples;
  for (int i = 0; i < 10; ++i) samples.push_back(spectral_model(RealMatrix(test::rotation(0.2) + random_matrix(rng, 2, 2, 0.01)), 0.1));
  const AveragedSpectrum avg = match_and_average(samples);
  const Eigen::Vector2d x(1.0, 0.0);
  const Trajectory vr = ensemble_variance(samples, reconstruct(avg.model, x, times).traj, x, times);
  CHECK(vr.states.minCoeff() >= 0.0);

  CHECK_THROWS_AS(ensemble_variance({}, mean, x0, times), ShapeError);
}
