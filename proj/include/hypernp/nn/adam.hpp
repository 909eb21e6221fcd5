#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypernp/common.hpp"

namespace hypernp::nn {

struct AdamSettings {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

template <typename T>
struct OptimizerState {
  AdamSettings settings;
  std::vector<T> first_moment;
  std::vector<T> second_moment;
  std::uint64_t step = 0;

  OptimizerState() = default;
  OptimizerState(std::size_t parameter_count, AdamSettings s = {})
      : settings(s), first_moment(parameter_count, T{}), second_moment(parameter_count, T{}) {}
};

/// Bias-corrected Adam:
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
///   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <typename T>
void adam_step(OptimizerState<T>& state, std::span<T> params, std::span<const T> gradients) {
  if (params.size() != gradients.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    fail(ErrorKind::dimension_mismatch,
         "adam_step: " + std::to_string(params.size()) + " parameters, " +
             std::to_string(gradients.size()) + " gradients, " +
             std::to_string(state.first_moment.size()) + " moments");
  }
  ++state.step;
  const auto& s = state.settings;
  const double t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(s.beta1);
  const T b2 = static_cast<T>(s.beta2);
  const T correction1 = static_cast<T>(1.0 - std::pow(s.beta1, t));
  const T correction2 = static_cast<T>(1.0 - std::pow(s.beta2, t));
  const T lr = static_cast<T>(s.learning_rate);
  const T eps = static_cast<T>(s.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = gradients[i];
    T& m = state.first_moment[i];
    T& v = state.second_moment[i];
    m = b1 * m + (T{1} - b1) * g;
    v = b2 * v + (T{1} - b2) * g * g;
    const T m_hat = m / correction1;
    const T v_hat = v / correction2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

}  // namespace hypernp::nn
