#ifndef MZDMD_LINALG_HPP
#define MZDMD_LINALG_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "mzdmd/errors.hpp"

namespace mzdmd {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultCondMax = 1e12;
inline constexpr double kDefaultPinvRtol = 1e-12;

struct EigDecomposition {
  Eigen::VectorXcd values;
  ComplexMatrix vectors;  // unit-norm columns, phase-normalized
};

/// Moore-Penrose pseudo-inverse from a thin SVD. Singular values below
/// rtol * sigma_max are treated as zero.
RealMatrix pinv(const RealMatrix& m, double rtol = kDefaultPinvRtol);

/// Eigenpairs of a real square matrix. Each eigenvector has unit 2-norm and
/// its largest-modulus component is real and positive.
EigDecomposition eig(const RealMatrix& a);

/// Scales a vector in place so its largest-modulus entry is real positive.
/// The first index reaching the maximum wins on exact ties.
void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v);

namespace detail {

template <typename Scalar>
void require_square(const Matrix<Scalar>& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ShapeError(std::string(what) + ": expected a nonempty square matrix, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace detail

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant (Higham 2005 coefficients).
template <typename Scalar>
Matrix<Scalar> expm(const Matrix<Scalar>& a) {
  detail::require_square(a, "expm");
  if (!a.allFinite()) throw NumericalError("expm: non-finite input");

  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  if (squarings > 1000) throw NumericalError("expm: norm too large to scale");

  const Matrix<Scalar> x = a / Scalar(std::ldexp(1.0, squarings));
  const Matrix<Scalar> id = Matrix<Scalar>::Identity(n, n);
  const Matrix<Scalar> x2 = x * x;
  const Matrix<Scalar> x4 = x2 * x2;
  const Matrix<Scalar> x6 = x4 * x2;

  const Matrix<Scalar> u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2);
  const Matrix<Scalar> u = x * (u_inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  const Matrix<Scalar> v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 +
                           b[4] * x4 + b[2] * x2 + b[0] * id;

  Matrix<Scalar> r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;

  if (!r.allFinite()) throw NumericalError("expm: overflow");
  return r;
}

template <typename Scalar>
struct ExpmFrechet {
  Matrix<Scalar> exp;
  Matrix<Scalar> derivative;  // L(A, E)
};

/// exp(A) together with its Frechet derivative along E, read off the
/// block-augmented exponential expm([[A, E], [0, A]]) = [[e^A, L], [0, e^A]].
template <typename Scalar>
ExpmFrechet<Scalar> expm_frechet(const Matrix<Scalar>& a, const Matrix<Scalar>& e) {
  detail::require_square(a, "expm_frechet");
  if (e.rows() != a.rows() || e.cols() != a.cols()) {
    throw ShapeError("expm_frechet: direction shape does not match A");
  }
  const Eigen::Index n = a.rows();
  Matrix<Scalar> block = Matrix<Scalar>::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.topRightCorner(n, n) = e;
  block.bottomRightCorner(n, n) = a;
  const Matrix<Scalar> big = expm(block);
  return {big.topLeftCorner(n, n), big.topRightCorner(n, n)};
}

/// Solves A X = B by partial-pivot LU. Refuses when the reciprocal
/// condition estimate puts cond(A) above cond_max.
template <typename Scalar>
Matrix<Scalar> solve(const Matrix<Scalar>& a, const Matrix<Scalar>& b,
                     double cond_max = kDefaultCondMax) {
  detail::require_square(a, "solve");
  if (a.cols() != b.rows()) {
    throw ShapeError("solve: A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " but B has " + std::to_string(b.rows()) + " rows");
  }
  const Eigen::PartialPivLU<Matrix<Scalar>> lu(a);
  const double rcond = lu.rcond();
  double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  // The complex rcond estimate can miss an exactly zero pivot.
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) cond = std::numeric_limits<double>::infinity();
  if (!(cond <= cond_max)) throw SingularityError("solve: matrix is singular or ill-conditioned", cond);
  Matrix<Scalar> x = lu.solve(b);
  if (!x.allFinite()) throw SingularityError("solve: non-finite solution", cond);
  return x;
}

template <typename Scalar>
Matrix<Scalar> matpow(const Matrix<Scalar>& m, int j) {
  detail::require_square(m, "matpow");
  if (j < 0) throw ShapeError("matpow: negative exponent");
  Matrix<Scalar> r = Matrix<Scalar>::Identity(m.rows(), m.cols());
  for (int k = 0; k < j; ++k) r = r * m;
  return r;
}

}  // namespace mzdmd

#endif  // MZDMD_LINALG_HPP
