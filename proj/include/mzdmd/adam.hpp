#ifndef MZDMD_ADAM_HPP
#define MZDMD_ADAM_HPP

#include <vector>

#include "mzdmd/linalg.hpp"
#include "mzdmd/models.hpp"

namespace mzdmd {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int iterations = 5;

  void validate() const;
};

struct OptState {
  RealMatrix params;
  RealMatrix first_moment;
  RealMatrix second_moment;
  int step_count = 0;

  static OptState start(const RealMatrix& params);
};

/// One bias-corrected Adam update.
OptState adam_step(const OptState& state, const RealMatrix& grad, const AdamConfig& cfg);

struct FitResult {
  RealMatrix op;
  std::vector<double> loss_trace;  // iterations + 1 entries, starting with the loss at a0
};

/// Fixed-budget Adam descent on the objective starting from a0.
FitResult fit_transition(const Objective& obj, const RealMatrix& a0, const AdamConfig& cfg);

}  // namespace mzdmd

#endif  // MZDMD_ADAM_HPP
