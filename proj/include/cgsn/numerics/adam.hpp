// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cgsn/numerics/params.hpp"

namespace cgsn::num {

/// Adam with decoupled weight decay.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

// Updates every parameter from its accumulated `grad`. Moments are created lazily on the
// first step and must keep the parameter shapes afterwards.
void adam_step(std::span<Parameter* const> params, AdamState& state);

}  // namespace cgsn::num
