// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/pipeline/memory_estimate.hpp"

#include <cmath>
#include <stdexcept>

namespace cgsn {

MemoryMode parse_memory_mode(const std::string& name) {
  if (name == "cgsn") return MemoryMode::kCgsn;
  if (name == "led-style") return MemoryMode::kLedStyle;
  throw std::invalid_argument("unknown memory mode '" + name + "' (expected cgsn or led-style)");
}

double MemoryModel::half_window() const { return std::floor(window / 2); }

MemoryEstimate estimate_memory(MemoryMode mode, const MemoryModel& m) {
  if (!(m.length > 0 && m.window > 0 && m.paragraphs > 0)) {
    throw std::invalid_argument("estimate_memory: L, W and B must be positive");
  }
  if (m.global_tokens < 0 || m.global_cost < 0) {
    throw std::invalid_argument("estimate_memory: G_t and M_global must be non-negative");
  }
  MemoryEstimate e;
  if (mode == MemoryMode::kLedStyle) {
    e.attention = m.length * (m.window + m.global_tokens);
  } else {
    const double half = m.half_window();
    e.attention = m.paragraphs * half * half;
    e.local = m.paragraphs * (half + 1) + 1;
    e.global = m.global_cost;
  }
  e.total = e.attention + e.local + e.global;
  return e;
}

}  // namespace cgsn
