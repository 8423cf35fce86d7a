#include "mzdmd/models.hpp"

#include <cmath>
#include <string>

namespace mzdmd {

namespace {

RealMatrix identity_like(const RealMatrix& a) { return RealMatrix::Identity(a.rows(), a.cols()); }

void require_operator(const Objective& obj, const RealMatrix& a) {
  obj.snapshots.validate();
  const Eigen::Index d = obj.snapshots.dim();
  if (a.rows() != d || a.cols() != d) {
    throw ShapeError("objective: operator is " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + ", snapshots have dimension " + std::to_string(d));
  }
  if (obj.kind != ObjectiveKind::plain_dmd && obj.memory.n.size() != d) {
    throw ShapeError("objective: memory vector length " + std::to_string(obj.memory.n.size()) +
                     " does not match dimension " + std::to_string(d));
  }
}

bool has_memory(const Objective& obj) {
  return obj.kind != ObjectiveKind::plain_dmd && !obj.memory.n.isZero(0.0);
}

double memory_coefficient(const Objective& obj) {
  const double dt = obj.snapshots.dt;
  switch (obj.kind) {
    case ObjectiveKind::mz_dmd:
      return dt * dt;
    case ObjectiveKind::t_model:
      return -dt;
    case ObjectiveKind::plain_dmd:
      break;
  }
  return 0.0;
}

// Columns v_0 = n, v_j = step * v_{j-1}.
RealMatrix power_orbit(const RealMatrix& step, const Eigen::VectorXd& n, Eigen::Index cols) {
  RealMatrix orbit(n.size(), cols);
  if (cols == 0) return orbit;
  orbit.col(0) = n;
  for (Eigen::Index j = 1; j < cols; ++j) orbit.col(j) = step * orbit.col(j - 1);
  return orbit;
}

// Given the adjoint of every orbit column (adj.col(j) = dL/dv_j, j >= 1),
// back-propagates through v_j = step * v_{j-1} and returns dL/dstep.
RealMatrix power_orbit_adjoint(const RealMatrix& step, const RealMatrix& orbit, const RealMatrix& adj) {
  RealMatrix grad = RealMatrix::Zero(step.rows(), step.cols());
  const Eigen::Index cols = orbit.cols();
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(step.rows());
  for (Eigen::Index j = cols - 1; j >= 1; --j) {
    carry = adj.col(j) + step.transpose() * carry;
    grad.noalias() += carry * orbit.col(j - 1).transpose();
  }
  return grad;
}

// Frechet adjoint: <G, L(X, E)> = <L(X^T, G), E>.
RealMatrix expm_frechet_adjoint(const RealMatrix& x, const RealMatrix& g) {
  const RealMatrix xt = x.transpose();
  return expm_frechet<double>(xt, g).derivative;
}

struct MzParts {
  RealMatrix shift;      // A - I
  RealMatrix exp_shift;  // e^{A - I}
  RealMatrix cayley;     // M(A)
  RealMatrix plus_inv;   // (A + I)^{-1}
  RealMatrix p_orbit;    // (e^{A-I} M(A))^j n
  RealMatrix e_orbit;    // e^{j(A-I)} n
  RealMatrix memory;     // (A - I)^{-1} F
};

MzParts mz_parts(const RealMatrix& a, const Eigen::VectorXd& n, Eigen::Index cols, double cond_max) {
  if (n.size() != a.rows()) throw ShapeError("mz_memory_matrix: memory vector length mismatch");
  const RealMatrix id = identity_like(a);
  MzParts p;
  p.shift = a - id;
  p.plus_inv = solve<double>(a + id, id, cond_max);
  p.cayley = id - 2.0 * p.plus_inv * p.shift;
  p.exp_shift = expm<double>(p.shift);
  const RealMatrix step = p.exp_shift * p.cayley;
  p.p_orbit = power_orbit(step, n, cols);
  p.e_orbit = power_orbit(p.exp_shift, n, cols);
  RealMatrix f = p.p_orbit - p.e_orbit;
  if (cols > 0) f.col(0).setZero();
  p.memory = solve<double>(p.shift, f, cond_max);
  if (cols > 0) p.memory.col(0).setZero();
  return p;
}

struct TParts {
  RealMatrix shift;
  RealMatrix exp_shift;
  RealMatrix orbit;   // e^{j(A-I)} n
  RealMatrix memory;  // j dt e^{j(A-I)} n
};

TParts t_parts(const RealMatrix& a, const Eigen::VectorXd& n, double dt, Eigen::Index cols) {
  if (n.size() != a.rows()) throw ShapeError("tmodel_memory_matrix: memory vector length mismatch");
  TParts p;
  p.shift = a - identity_like(a);
  p.exp_shift = expm<double>(p.shift);
  p.orbit = power_orbit(p.exp_shift, n, cols);
  p.memory.resize(a.rows(), cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    p.memory.col(j) = (static_cast<double>(j) * dt) * p.orbit.col(j);
  }
  return p;
}

}  // namespace

void SnapshotPair::validate() const {
  if (x_minus.size() == 0) throw ShapeError("snapshots: empty");
  if (x_plus.rows() != x_minus.rows() || x_plus.cols() != x_minus.cols()) {
    throw ShapeError("snapshots: X+ and X- differ in shape");
  }
  if (!(dt > 0.0)) throw ShapeError("snapshots: dt must be positive");
}

SnapshotPair make_snapshots(const RealMatrix& data, double dt) {
  if (data.cols() < 2) throw ShapeError("make_snapshots: need at least two snapshots");
  const Eigen::Index m = data.cols();
  SnapshotPair s{data.rightCols(m - 1), data.leftCols(m - 1), dt};
  s.validate();
  return s;
}

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::plain_dmd:
      return "dmd";
    case ObjectiveKind::mz_dmd:
      return "mz-dmd";
    case ObjectiveKind::t_model:
      return "t-model";
  }
  return "unknown";
}

RealMatrix dmd_fit(const SnapshotPair& s, double rtol) {
  s.validate();
  return s.x_plus * pinv(s.x_minus, rtol);
}

RealMatrix cayley_map(const RealMatrix& a, double cond_max) {
  detail::require_square<double>(a, "cayley_map");
  const RealMatrix id = identity_like(a);
  // (A - I) and (A + I)^{-1} commute, so a left solve suffices.
  return id - 2.0 * solve<double>(a + id, a - id, cond_max);
}

RealMatrix mz_memory_matrix(const RealMatrix& a, const Eigen::VectorXd& n, Eigen::Index cols,
                            double cond_max) {
  detail::require_square<double>(a, "mz_memory_matrix");
  return mz_parts(a, n, cols, cond_max).memory;
}

RealMatrix tmodel_memory_matrix(const RealMatrix& a, const Eigen::VectorXd& n, double dt,
                                Eigen::Index cols) {
  detail::require_square<double>(a, "tmodel_memory_matrix");
  if (!(dt > 0.0)) throw ShapeError("tmodel_memory_matrix: dt must be positive");
  return t_parts(a, n, dt, cols).memory;
}

RealMatrix objective_residual(const Objective& obj, const RealMatrix& a) {
  require_operator(obj, a);
  const SnapshotPair& s = obj.snapshots;
  RealMatrix r = s.x_plus - a * s.x_minus;
  if (!has_memory(obj)) return r;
  const double c = memory_coefficient(obj);
  if (obj.kind == ObjectiveKind::mz_dmd) {
    r += c * mz_memory_matrix(a, obj.memory.n, s.cols());
  } else {
    r += c * tmodel_memory_matrix(a, obj.memory.n, s.dt, s.cols());
  }
  return r;
}

double objective_value(const Objective& obj, const RealMatrix& a) {
  return objective_residual(obj, a).squaredNorm();
}

RealMatrix objective_gradient(const Objective& obj, const RealMatrix& a) {
  return objective_value_and_gradient(obj, a).gradient;
}

ValueAndGradient objective_value_and_gradient(const Objective& obj, const RealMatrix& a) {
  require_operator(obj, a);
  const SnapshotPair& s = obj.snapshots;
  const Eigen::Index cols = s.cols();
  const double c = memory_coefficient(obj);

  RealMatrix r = s.x_plus - a * s.x_minus;
  if (!has_memory(obj)) {
    return {r.squaredNorm(), -2.0 * r * s.x_minus.transpose()};
  }

  if (obj.kind == ObjectiveKind::t_model) {
    const TParts p = t_parts(a, obj.memory.n, s.dt, cols);
    r += c * p.memory;
    const RealMatrix g = 2.0 * r;
    RealMatrix grad = -g * s.x_minus.transpose();

    RealMatrix orbit_adj(a.rows(), cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      orbit_adj.col(j) = (c * static_cast<double>(j) * s.dt) * g.col(j);
    }
    const RealMatrix exp_adj = power_orbit_adjoint(p.exp_shift, p.orbit, orbit_adj);
    grad += expm_frechet_adjoint(p.shift, exp_adj);
    return {r.squaredNorm(), grad};
  }

  const MzParts p = mz_parts(a, obj.memory.n, cols, kDefaultCondMax);
  r += c * p.memory;
  const RealMatrix g = 2.0 * r;
  RealMatrix grad = -g * s.x_minus.transpose();

  // W = S^{-1} F  =>  dW = -S^{-1} dA W + S^{-1} dF.
  RealMatrix z = solve<double>(p.shift.transpose(), RealMatrix(c * g));
  z.col(0).setZero();
  grad.noalias() -= z * p.memory.transpose();

  // F_j = p_j - e_j for j >= 1.
  const RealMatrix step = p.exp_shift * p.cayley;
  const RealMatrix step_adj = power_orbit_adjoint(step, p.p_orbit, z);
  RealMatrix exp_adj = power_orbit_adjoint(p.exp_shift, p.e_orbit, RealMatrix(-z));

  // step = E K
  exp_adj.noalias() += step_adj * p.cayley.transpose();
  const RealMatrix cayley_adj = p.exp_shift.transpose() * step_adj;

  // K = -I + 4 (A + I)^{-1}  =>  dK = -4 B^{-1} dA B^{-1}.
  grad.noalias() -= 4.0 * p.plus_inv.transpose() * cayley_adj * p.plus_inv.transpose();
  grad += expm_frechet_adjoint(p.shift, exp_adj);
  return {r.squaredNorm(), grad};
}

RealMatrix fd_gradient(const std::function<double(const RealMatrix&)>& f, const RealMatrix& a,
                       double h) {
  if (!(h > 0.0)) throw ShapeError("fd_gradient: step must be positive");
  RealMatrix grad(a.rows(), a.cols());
  RealMatrix probe = a;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      probe(i, j) = a(i, j) + h;
      const double up = f(probe);
      probe(i, j) = a(i, j) - h;
      const double down = f(probe);
      probe(i, j) = a(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

RealMatrix fd_gradient(const Objective& obj, const RealMatrix& a, double h) {
  return fd_gradient([&obj](const RealMatrix& x) { return objective_value(obj, x); }, a, h);
}

}  // namespace mzdmd
