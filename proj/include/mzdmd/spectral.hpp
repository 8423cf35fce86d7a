#ifndef MZDMD_SPECTRAL_HPP
#define MZDMD_SPECTRAL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "mzdmd/adam.hpp"
#include "mzdmd/linalg.hpp"
#include "mzdmd/models.hpp"
#include "mzdmd/oscillator.hpp"

namespace mzdmd {

/// Discrete-time spectrum of a transition operator sampled with step dt.
struct SpectralModel {
  Eigen::VectorXcd values;
  ComplexMatrix vectors;
  double dt = 0.1;

  Eigen::Index dim() const { return values.size(); }
};

SpectralModel spectral_model(const RealMatrix& op, double dt);

/// Draws n ~ N(0, sigma^2 I) of length dim from memory stream `index`.
MemoryInit sample_memory(double sigma, Eigen::Index dim, std::uint64_t seed, std::uint64_t index);

struct EnsembleFit {
  std::vector<RealMatrix> operators;
  std::vector<SpectralModel> models;
  std::vector<std::vector<double>> loss_traces;
};

/// Fits one operator per sampled memory initialization, each started from the
/// plain DMD solution. Samples with an exactly zero memory vector return the
/// plain DMD solution unchanged. Any failing sample fails the whole ensemble.
EnsembleFit fit_ensemble(ObjectiveKind kind, const SnapshotPair& s, double sigma, int n_u,
                         const AdamConfig& cfg, std::uint64_t seed, unsigned threads = 0);

struct AveragedSpectrum {
  SpectralModel model;
  // Models whose optimal matching was not unique within 1e-12 in cost.
  int degenerate_matchings = 0;
};

/// Matches every model's eigenpairs to the first model's by minimum total
/// eigenvalue distance, aligns eigenvector phases to the reference and
/// averages. Ties in the matching are broken by eigenvector overlap.
AveragedSpectrum match_and_average(const std::vector<SpectralModel>& models);

struct Reconstruction {
  Trajectory traj;          // real part of V diag(e^{omega t}) V^{-1} x0
  double max_imag = 0.0;    // largest |Im| discarded
  bool imag_warning = false;
  bool negative_real_eigenvalue = false;
};

/// Continuous-time reconstruction with omega = log(lambda) / dt on the principal branch.
Reconstruction reconstruct(const SpectralModel& model, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& times, double cond_max = kDefaultCondMax);

/// Pointwise (1/N) sum_i (x_i(t) - mean(t))^2 over the per-sample reconstructions.
Trajectory ensemble_variance(const std::vector<SpectralModel>& per_sample, const Trajectory& mean_traj,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& times);

}  // namespace mzdmd

#endif  // MZDMD_SPECTRAL_HPP
