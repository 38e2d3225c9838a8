// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/model/evidence_memory.hpp"

#include <stdexcept>
#include <string>

namespace cgsn {

using num::Value;

Value summarize(const Value& logits, const Value& enhanced) {
  if (logits.size() != enhanced.rows()) {
    throw num::DimensionError("summarize: " + std::to_string(logits.size()) + " logits for " +
                              std::to_string(enhanced.rows()) + " paragraphs");
  }
  const Value weights = num::softmax(num::reshape(logits.detach(), {1, enhanced.rows()}));
  return num::matmul(weights, enhanced.detach()).detach();
}

EvidenceMemoryNetwork EvidenceMemoryNetwork::create(num::ParamStore& store, std::size_t dim, num::Rng& rng) {
  EvidenceMemoryNetwork m;
  m.merge = nn::Linear::create(store, "memory.merge", 2 * dim, dim, true, rng);
  m.gate = nn::Linear::create(store, "memory.gate", 2 * dim, 1, true, rng);
  return m;
}

GlobalGraph EvidenceMemoryNetwork::write(num::Tape& tape, const GlobalGraph& global, const Value& summary) const {
  if (!summary.buffer()) throw std::logic_error("memory write: no cached summary");
  const std::size_t n = global.paragraphs.rows();
  const std::size_t d = global.paragraphs.cols();
  if (summary.size() != d) {
    throw num::DimensionError("memory write: summary " + num::shape_str(summary.shape()) +
                              " does not match node dimension " + std::to_string(d));
  }
  const std::vector<std::size_t> repeat(n, 0);
  const Value m = num::gather_rows(num::reshape(summary, {1, d}), repeat);
  const Value cat = num::concat_cols({global.paragraphs, m});
  const Value merged = num::tanh(merge(tape, cat));
  const Value gamma = num::sigmoid(gate(tape, cat));
  GlobalGraph out = global;
  out.paragraphs = num::lerp_rows(global.paragraphs, merged, gamma);
  return out;
}

}  // namespace cgsn
