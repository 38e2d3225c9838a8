// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Central finite-difference checks shared by the unit tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cgsn/numerics/ops.hpp"
#include "cgsn/numerics/params.hpp"

namespace cgsn::testing {

using LossFn = std::function<num::Value(num::Tape&, const std::vector<num::Value>&)>;

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-8});
}

// Max over inputs of the norm-wise relative error between backward and central differences.
inline double gradcheck(const LossFn& f, std::vector<num::Value> inputs, double h = 1e-4) {
  num::Tape tape;
  std::vector<num::Value> leaves;
  for (const auto& v : inputs) leaves.push_back(tape.leaf(v));
  const auto grads = tape.backward(f(tape, leaves));

  double worst = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto analytic = grads.of(leaves[k]);
    std::vector<double> numeric(inputs[k].size());
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      auto eval = [&](double delta) {
        std::vector<num::Value> moved = inputs;
        std::vector<double> d(inputs[k].data().begin(), inputs[k].data().end());
        d[i] += delta;
        moved[k] = num::Value(inputs[k].shape(), std::move(d));
        num::Tape t = num::Tape::inference();
        return f(t, moved).item();
      };
      numeric[i] = (eval(h) - eval(-h)) / (2 * h);
    }
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

inline num::Value random_value(num::Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> d(num::numel(shape));
  for (auto& x : d) x = n(rng);
  return num::Value(std::move(shape), std::move(d));
}

// Random weighting so that a loss depends on every output entry differently.
inline num::Value weighted_sum(const num::Value& v, std::uint64_t seed = 99) {
  std::mt19937_64 rng(seed);
  return num::sum(num::mul(v, random_value(v.shape(), rng)));
}

}  // namespace cgsn::testing
