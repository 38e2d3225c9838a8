// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/numerics/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace cgsn::num {

void adam_step(std::span<Parameter* const> params, AdamState& state) {
  if (state.first_moment.empty()) {
    for (const Parameter* p : params) {
      state.first_moment.emplace_back(p->value().size(), 0.0);
      state.second_moment.emplace_back(p->value().size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw DimensionError("adam_step: optimizer state tracks " + std::to_string(state.first_moment.size()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  const double lr = state.learning_rate;

  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    const auto n = p.value().size();
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    if (m.size() != n) {
      throw DimensionError("adam_step: moment shape differs from parameter " + p.name());
    }
    if (!p.grad.empty() && p.grad.size() != n) {
      throw DimensionError("adam_step: gradient length " + std::to_string(p.grad.size()) +
                           " differs from parameter " + p.name() + " " + shape_str(p.shape()));
    }
    std::vector<double> w(p.value().data().begin(), p.value().data().end());
    for (std::size_t i = 0; i < n; ++i) {
      const double g = p.grad.empty() ? 0.0 : p.grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= lr * state.weight_decay * w[i];
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    p.assign(std::move(w));
  }
}

}  // namespace cgsn::num
