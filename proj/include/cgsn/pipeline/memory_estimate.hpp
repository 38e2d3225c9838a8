// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Relative activation-memory cost of segment-wise processing versus a sliding-window
// encoder that sees the whole document at once.

#pragma once

#include <cstddef>
#include <string>

namespace cgsn {

enum class MemoryMode { kCgsn, kLedStyle };

MemoryMode parse_memory_mode(const std::string& name);

struct MemoryModel {
  double length = 0;         // L, document tokens
  double window = 0;         // W, local attention window
  double global_tokens = 0;  // G_t
  double paragraphs = 0;     // B, paragraphs per segment
  double global_cost = 100;  // M_global, fixed by the bank sizes

  double half_window() const;  // W_half = ⌊W/2⌋
};

struct MemoryEstimate {
  double attention = 0;  // B·W_half² for cgsn, L·(W + G_t) for led-style
  double local = 0;      // f_local(B, W) = B·(W_half + 1) + 1: token, paragraph and segment nodes
  double global = 0;     // M_global
  double total = 0;
};

// Throws std::invalid_argument on non-positive L, W or B, or negative G_t / M_global.
MemoryEstimate estimate_memory(MemoryMode mode, const MemoryModel& model);

}  // namespace cgsn
