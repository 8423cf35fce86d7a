#include "mzdmd/spectral.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "mzdmd/assignment.hpp"
#include "mzdmd/parallel.hpp"

namespace mzdmd {

namespace {

using cd = std::complex<double>;

constexpr double kMatchTieTol = 1e-12;

double overlap(const SpectralModel& ref, const SpectralModel& m, const Assignment& a) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < ref.dim(); ++i) {
    const auto j = a.column_of_row[static_cast<std::size_t>(i)];
    total += std::abs(ref.vectors.col(i).dot(m.vectors.col(j)));
  }
  return total;
}

}  // namespace

SpectralModel spectral_model(const RealMatrix& op, double dt) {
  if (!(dt > 0.0)) throw ShapeError("spectral_model: dt must be positive");
  EigDecomposition e = eig(op);
  return {std::move(e.values), std::move(e.vectors), dt};
}

MemoryInit sample_memory(double sigma, Eigen::Index dim, std::uint64_t seed, std::uint64_t index) {
  if (!(sigma >= 0.0)) throw ShapeError("sample_memory: sigma must be non-negative");
  Rng rng = make_stream(seed, StreamDomain::memory, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  MemoryInit mem{Eigen::VectorXd(dim), sigma};
  for (Eigen::Index i = 0; i < dim; ++i) mem.n(i) = sigma * normal(rng);
  return mem;
}

EnsembleFit fit_ensemble(ObjectiveKind kind, const SnapshotPair& s, double sigma, int n_u,
                         const AdamConfig& cfg, std::uint64_t seed, unsigned threads) {
  if (n_u < 1) throw ShapeError("fit_ensemble: n_u must be at least 1");
  cfg.validate();
  s.validate();
  const RealMatrix a0 = dmd_fit(s);

  const auto count = static_cast<std::size_t>(n_u);
  EnsembleFit out;
  out.operators.resize(count);
  out.models.resize(count);
  out.loss_traces.resize(count);
  std::vector<std::string> failures(count);

  parallel_for(count, threads, [&](std::size_t i) {
    try {
      const Objective obj{kind, s, sample_memory(sigma, s.dim(), seed, i)};
      FitResult fit;
      if (obj.memory.n.isZero(0.0)) {
        // Zero memory: the objective is plain least squares, minimized by a0.
        fit = FitResult{a0, {objective_value(obj, a0)}};
      } else {
        fit = fit_transition(obj, a0, cfg);
      }
      out.models[i] = spectral_model(fit.op, s.dt);
      out.operators[i] = std::move(fit.op);
      out.loss_traces[i] = std::move(fit.loss_trace);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  std::string report;
  int failed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (failures[i].empty()) continue;
    if (failed++ == 0) report = "sample " + std::to_string(i) + ": " + failures[i];
  }
  if (failed > 0) {
    throw NumericalError("fit_ensemble: " + std::to_string(failed) + " of " + std::to_string(n_u) +
                         " samples failed; first " + report);
  }
  return out;
}

AveragedSpectrum match_and_average(const std::vector<SpectralModel>& models) {
  if (models.empty()) throw ShapeError("match_and_average: no models");
  const SpectralModel& ref = models.front();
  const Eigen::Index d = ref.dim();
  for (const auto& m : models) {
    if (m.dim() != d || m.vectors.rows() != d || m.vectors.cols() != d) {
      throw ShapeError("match_and_average: dimension mismatch");
    }
    if (m.dt != ref.dt) throw ShapeError("match_and_average: dt mismatch");
  }

  AveragedSpectrum out;
  Eigen::VectorXcd value_sum = Eigen::VectorXcd::Zero(d);
  ComplexMatrix vector_sum = ComplexMatrix::Zero(d, d);

  for (const auto& m : models) {
    Eigen::MatrixXd cost(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) cost(i, j) = std::abs(ref.values(i) - m.values(j));
    }
    Assignment chosen = solve_assignment(cost);
    bool tied = false;
    double chosen_overlap = overlap(ref, m, chosen);
    for (const auto& alt : assignment_alternatives(cost, chosen)) {
      if (alt.cost - chosen.cost >= kMatchTieTol || alt.column_of_row == chosen.column_of_row) continue;
      tied = true;
      const double alt_overlap = overlap(ref, m, alt);
      if (alt_overlap > chosen_overlap) {
        chosen_overlap = alt_overlap;
        chosen = alt;
      }
    }
    if (tied) ++out.degenerate_matchings;

    for (Eigen::Index i = 0; i < d; ++i) {
      const auto j = chosen.column_of_row[static_cast<std::size_t>(i)];
      Eigen::VectorXcd v = m.vectors.col(j);
      const cd inner = ref.vectors.col(i).dot(v);  // conj(ref) . v
      if (std::abs(inner) > 0.0) v *= std::conj(inner) / std::abs(inner);
      value_sum(i) += m.values(j);
      vector_sum.col(i) += v;
    }
  }

  const double n = static_cast<double>(models.size());
  out.model.values = value_sum / n;
  out.model.vectors = vector_sum / n;
  out.model.dt = ref.dt;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double norm = out.model.vectors.col(j).norm();
    if (norm > 0.0) out.model.vectors.col(j) /= norm;
    normalize_phase(out.model.vectors.col(j));
  }
  return out;
}

Reconstruction reconstruct(const SpectralModel& model, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& times, double cond_max) {
  const Eigen::Index d = model.dim();
  if (x0.size() != d) throw ShapeError("reconstruct: x0 length does not match the model");
  if (!(model.dt > 0.0)) throw ShapeError("reconstruct: dt must be positive");

  Reconstruction out;
  Eigen::VectorXcd omega(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const cd lambda = model.values(i);
    if (std::abs(lambda) == 0.0) throw BranchError("reconstruct: zero eigenvalue has no logarithm");
    if (lambda.imag() == 0.0 && lambda.real() < 0.0) out.negative_real_eigenvalue = true;
    omega(i) = std::log(lambda) / model.dt;
  }

  const Eigen::VectorXcd coeffs = solve<cd>(model.vectors, ComplexMatrix(x0.cast<cd>()), cond_max);
  out.traj.times = times;
  out.traj.states.resize(times.size(), d);
  double max_norm = 0.0;
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    const Eigen::VectorXcd growth = (omega * times(k)).array().exp().matrix();
    const Eigen::VectorXcd x = model.vectors * growth.cwiseProduct(coeffs);
    out.traj.states.row(k) = x.real().transpose();
    out.max_imag = std::max(out.max_imag, x.imag().cwiseAbs().maxCoeff());
    max_norm = std::max(max_norm, x.norm());
  }
  out.imag_warning = out.max_imag > 1e-6 * max_norm;
  return out;
}

Trajectory ensemble_variance(const std::vector<SpectralModel>& per_sample, const Trajectory& mean_traj,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& times) {
  if (per_sample.empty()) throw ShapeError("ensemble_variance: no samples");
  if (mean_traj.states.rows() != times.size() || mean_traj.states.cols() != x0.size()) {
    throw ShapeError("ensemble_variance: mean trajectory shape mismatch");
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(times.size(), x0.size());
  for (const auto& m : per_sample) {
    const Reconstruction r = reconstruct(m, x0, times);
    acc += (r.traj.states - mean_traj.states).cwiseAbs2();
  }
  return {times, acc / static_cast<double>(per_sample.size())};
}

}  // namespace mzdmd
