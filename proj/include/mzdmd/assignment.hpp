#ifndef MZDMD_ASSIGNMENT_HPP
#define MZDMD_ASSIGNMENT_HPP

#include <Eigen/Dense>

#include <vector>

namespace mzdmd {

struct Assignment {
  std::vector<int> column_of_row;
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(n^3)). Entries equal to +infinity are forbidden.
Assignment solve_assignment(const Eigen::MatrixXd& cost);

/// Near-optimal alternatives to `best`: for each matched edge, the optimum
/// with that edge forbidden. Entries with no feasible completion are skipped.
std::vector<Assignment> assignment_alternatives(const Eigen::MatrixXd& cost, const Assignment& best);

}  // namespace mzdmd

#endif  // MZDMD_ASSIGNMENT_HPP
