#ifndef MZDMD_MODELS_HPP
#define MZDMD_MODELS_HPP

#include <Eigen/Dense>

#include <functional>
#include <string_view>

#include "mzdmd/linalg.hpp"

namespace mzdmd {

/// Paired snapshot matrices in ascending time: column k of x_minus is x_k and
/// column k of x_plus is x_{k+1}.
struct SnapshotPair {
  RealMatrix x_plus;
  RealMatrix x_minus;
  double dt = 0.1;

  Eigen::Index dim() const { return x_minus.rows(); }
  Eigen::Index cols() const { return x_minus.cols(); }
  void validate() const;
};

/// Builds X- / X+ from a d x m data matrix whose columns ascend in time.
SnapshotPair make_snapshots(const RealMatrix& data, double dt);

/// Random vector standing in for the initial memory term, n ~ N(0, sigma^2 I).
struct MemoryInit {
  Eigen::VectorXd n;
  double sigma = 0.0;
};

enum class ObjectiveKind { plain_dmd, mz_dmd, t_model };

std::string_view to_string(ObjectiveKind kind);

struct Objective {
  ObjectiveKind kind = ObjectiveKind::plain_dmd;
  SnapshotPair snapshots;
  MemoryInit memory;
};

struct ValueAndGradient {
  double value = 0.0;
  RealMatrix gradient;
};

/// Least-squares one-step operator X+ pinv(X-).
RealMatrix dmd_fit(const SnapshotPair& s, double rtol = kDefaultPinvRtol);

/// Cayley-type map I - 2 (A - I)(A + I)^{-1}.
RealMatrix cayley_map(const RealMatrix& a, double cond_max = kDefaultCondMax);

/// Memory matrix of the Mori-Zwanzig objective, (A - I)^{-1} [0, F_1, ..., F_{cols-1}]
/// with F_j = e^{j(A - I)} (M(A)^j - I) n.
RealMatrix mz_memory_matrix(const RealMatrix& a, const Eigen::VectorXd& n, Eigen::Index cols,
                            double cond_max = kDefaultCondMax);

/// Memory matrix of the t-model objective, columns g_j = j dt e^{j(A - I)} n.
RealMatrix tmodel_memory_matrix(const RealMatrix& a, const Eigen::VectorXd& n, double dt,
                                Eigen::Index cols);

/// Residual X+ - A X- + c * memory, with c = +dt^2 (mz-dmd), -dt (t-model), 0 (plain).
RealMatrix objective_residual(const Objective& obj, const RealMatrix& a);

double objective_value(const Objective& obj, const RealMatrix& a);

RealMatrix objective_gradient(const Objective& obj, const RealMatrix& a);

/// Value and exact gradient in a single pass. The gradient is assembled in
/// reverse mode through the snapshot recursions, the resolvents and the
/// adjoint Frechet derivative of expm.
ValueAndGradient objective_value_and_gradient(const Objective& obj, const RealMatrix& a);

/// Entrywise central differences of an arbitrary scalar matrix function.
RealMatrix fd_gradient(const std::function<double(const RealMatrix&)>& f, const RealMatrix& a,
                       double h);

RealMatrix fd_gradient(const Objective& obj, const RealMatrix& a, double h);

}  // namespace mzdmd

#endif  // MZDMD_MODELS_HPP
