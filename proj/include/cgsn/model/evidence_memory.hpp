// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Carries a summary of the paragraphs the selector favoured in one segment into the
// global paragraph bank of the next.

#pragma once

#include "cgsn/model/global_graph.hpp"

namespace cgsn {

// Softmax over the paragraph logits, then the weighted sum of enhanced nodes; [1 × d].
// The result is detached: nothing flows back into the previous segment.
num::Value summarize(const num::Value& logits, const num::Value& enhanced);

class EvidenceMemoryNetwork {
 public:
  static EvidenceMemoryNetwork create(num::ParamStore& store, std::size_t dim, num::Rng& rng);

  // g_i ← γ_i · tanh(W_m[g_i; m] + b_m) + (1 − γ_i) · g_i, with γ_i = σ(w_γ·[g_i; m] + b_γ).
  // Only the paragraph bank changes.
  GlobalGraph write(num::Tape& tape, const GlobalGraph& global, const num::Value& summary) const;

  nn::Linear merge;
  nn::Linear gate;
};

}  // namespace cgsn
