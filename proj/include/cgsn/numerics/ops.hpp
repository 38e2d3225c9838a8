// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable operations. Rank-1 inputs are treated as a single row wherever a
// rank-2 operand is expected. Results are recorded on the tape of their inputs when
// any input requires a gradient.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cgsn/numerics/value.hpp"

namespace cgsn::num {

Value matmul(const Value& a, const Value& b);
Value transpose(const Value& a);

Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value scale(const Value& a, double factor);
// a[m×n] + bias[n] on every row.
Value add_row(const Value& a, const Value& bias);
// Row i of a[m×n] multiplied by g[i] (g has m entries).
Value scale_rows(const Value& a, const Value& g);
// (1 − γ_i)·a_i + γ_i·b_i per row; γ has one entry per row.
Value lerp_rows(const Value& a, const Value& b, const Value& gamma);

Value tanh(const Value& a);
Value sigmoid(const Value& a);

// Softmax along `axis` (0 or 1 for rank 2, 0 for rank 1), max-subtracted.
Value softmax(const Value& v, int axis = -1);
// Row-wise softmax over entries whose mask byte is non-zero; masked entries get exactly 0.
// Every row must keep at least one entry.
Value masked_softmax_rows(const Value& scores, std::span<const std::uint8_t> mask);

Value concat_cols(const std::vector<Value>& parts);
Value concat_rows(const std::vector<Value>& parts);
Value slice_cols(const Value& a, std::size_t begin, std::size_t end);
Value slice_rows(const Value& a, std::size_t begin, std::size_t end);
Value gather_rows(const Value& a, std::span<const std::size_t> rows);
// Shares storage; the element count must match.
Value reshape(const Value& a, Shape shape);

// Column-wise mean over rows: [m×n] → [1×n].
Value mean_rows(const Value& a);
Value sum(const Value& a);

// Mean binary cross-entropy of logits against {0,1} labels, computed in log-sum-exp form.
Value bce_with_logits(const Value& logits, std::span<const int> labels);

}  // namespace cgsn::num
