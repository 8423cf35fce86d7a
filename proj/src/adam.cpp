#include "mzdmd/adam.hpp"

#include <cmath>
#include <string>

namespace mzdmd {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ShapeError("adam: learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ShapeError("adam: beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ShapeError("adam: beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ShapeError("adam: epsilon must be positive");
  if (iterations < 1) throw ShapeError("adam: iterations must be at least 1");
}

OptState OptState::start(const RealMatrix& params) {
  return {params, RealMatrix::Zero(params.rows(), params.cols()),
          RealMatrix::Zero(params.rows(), params.cols()), 0};
}

OptState adam_step(const OptState& state, const RealMatrix& grad, const AdamConfig& cfg) {
  if (grad.rows() != state.params.rows() || grad.cols() != state.params.cols()) {
    throw ShapeError("adam_step: gradient shape does not match parameters");
  }
  OptState next;
  next.step_count = state.step_count + 1;
  next.first_moment = cfg.beta1 * state.first_moment + (1.0 - cfg.beta1) * grad;
  next.second_moment = cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * grad.cwiseAbs2();

  const double bias1 = 1.0 - std::pow(cfg.beta1, next.step_count);
  const double bias2 = 1.0 - std::pow(cfg.beta2, next.step_count);
  const RealMatrix m_hat = next.first_moment / bias1;
  const RealMatrix v_hat = next.second_moment / bias2;
  next.params = state.params -
                cfg.learning_rate * m_hat.cwiseQuotient((v_hat.cwiseSqrt().array() + cfg.epsilon).matrix());
  return next;
}

FitResult fit_transition(const Objective& obj, const RealMatrix& a0, const AdamConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = obj.snapshots.dim();
  if (a0.rows() != d || a0.cols() != d) {
    throw ShapeError("fit_transition: initial operator does not match snapshot dimension");
  }

  FitResult out;
  out.loss_trace.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  OptState state = OptState::start(a0);
  for (int it = 0; it < cfg.iterations; ++it) {
    const ValueAndGradient vg = objective_value_and_gradient(obj, state.params);
    if (!std::isfinite(vg.value) || !vg.gradient.allFinite()) {
      throw DivergenceError("fit_transition: non-finite loss or gradient", static_cast<std::size_t>(it));
    }
    out.loss_trace.push_back(vg.value);
    state = adam_step(state, vg.gradient, cfg);
  }
  const double final_loss = objective_value(obj, state.params);
  if (!std::isfinite(final_loss)) {
    throw DivergenceError("fit_transition: non-finite loss", static_cast<std::size_t>(cfg.iterations));
  }
  out.loss_trace.push_back(final_loss);
  out.op = std::move(state.params);
  return out;
}

}  // namespace mzdmd
