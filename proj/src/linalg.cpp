#include "mzdmd/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace mzdmd {

RealMatrix pinv(const RealMatrix& m, double rtol) {
  if (m.size() == 0) throw ShapeError("pinv: empty matrix");
  if (!(rtol > 0.0)) throw ShapeError("pinv: rtol must be positive");
  if (!m.allFinite()) throw NumericalError("pinv: non-finite input");

  const Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("pinv: SVD did not converge");

  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rtol * sv(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best_abs) {
      best_abs = mag;
      best = i;
    }
  }
  if (best_abs <= 0.0) return;
  const std::complex<double> phase = std::conj(v(best)) / best_abs;
  v *= phase;
  v(best) = std::complex<double>(std::abs(v(best)), 0.0);
}

EigDecomposition eig(const RealMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw ShapeError("eig: expected a nonempty square matrix");
  if (!a.allFinite()) throw NumericalError("eig: non-finite input");

  const Eigen::EigenSolver<RealMatrix> solver(a, true);
  if (solver.info() != Eigen::Success) throw NumericalError("eig: QR iteration did not converge");

  EigDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    const double norm = out.vectors.col(j).norm();
    if (norm > 0.0) out.vectors.col(j) /= norm;
    normalize_phase(out.vectors.col(j));
  }
  return out;
}

}  // namespace mzdmd
