#include "mzdmd/assignment.hpp"

#include <cmath>
#include <limits>

#include "mzdmd/errors.hpp"

namespace mzdmd {

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw ShapeError("solve_assignment: cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based e-maxx formulation; row 0 / column 0 are sentinels.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double c = cost(i0 - 1, j - 1);
        const double cur = std::isinf(c) ? inf : c - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0 || std::isinf(delta)) throw NumericalError("solve_assignment: no feasible matching");
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.column_of_row.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) out.column_of_row[static_cast<std::size_t>(match[j] - 1)] = j - 1;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.column_of_row[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<Assignment> assignment_alternatives(const Eigen::MatrixXd& cost, const Assignment& best) {
  std::vector<Assignment> out;
  const int n = static_cast<int>(cost.rows());
  if (n < 2) return out;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd restricted = cost;
    restricted(i, best.column_of_row[static_cast<std::size_t>(i)]) = std::numeric_limits<double>::infinity();
    try {
      out.push_back(solve_assignment(restricted));
    } catch (const NumericalError&) {
    }
  }
  return out;
}

}  // namespace mzdmd
