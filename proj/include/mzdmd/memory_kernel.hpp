#ifndef MZDMD_MEMORY_KERNEL_HPP
#define MZDMD_MEMORY_KERNEL_HPP

#include <Eigen/Dense>

#include <vector>

namespace mzdmd {

// Memory-kernel sequences in the eigenbasis of the resolved generator, where
// the generator is the diagonal matrix diag(lambda).

/// M_n = e^{dt Lambda} M(Lambda) M_{n-1} with
/// M(Lambda) = I - dt Lambda (I + dt/2 Lambda)^{-1}. Returns M_1 .. M_steps.
std::vector<Eigen::VectorXcd> memory_kernel_closed(const Eigen::VectorXcd& lambda,
                                                   const Eigen::VectorXcd& m0, int steps, double dt);

/// Direct trapezoidal evaluation: every step re-sums all previous terms
/// e^{Lambda (n-k) dt} M_k. Quadratic in steps. Returns M_1 .. M_steps.
std::vector<Eigen::VectorXcd> memory_kernel_trapezoid(const Eigen::VectorXcd& lambda,
                                                      const Eigen::VectorXcd& m0, int steps,
                                                      double dt);

/// Diagonal of M(Lambda).
Eigen::VectorXcd memory_cayley_diagonal(const Eigen::VectorXcd& lambda, double dt);

/// Diagonal of M^n + I + 2 sum_{k=1}^{n-1} M^k, summed term by term.
Eigen::VectorXcd memory_power_sum(const Eigen::VectorXcd& lambda, double dt, int n);

/// Diagonal of (M^n - I)(-(2/dt) Lambda^{-1}), the telescoped form of
/// memory_power_sum. Requires nonzero lambda.
Eigen::VectorXcd memory_power_sum_telescoped(const Eigen::VectorXcd& lambda, double dt, int n);

}  // namespace mzdmd

#endif  // MZDMD_MEMORY_KERNEL_HPP
