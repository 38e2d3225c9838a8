// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/model/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace cgsn::nn {

Linear Linear::create(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
                      bool with_bias, Rng& rng) {
  Linear l;
  l.weight = &store.create(name + ".weight", {in, out}, num::Init::kXavier, rng);
  if (with_bias) l.bias = &store.create(name + ".bias", {out}, num::Init::kZeros, rng);
  return l;
}

Value Linear::operator()(Tape& tape, const Value& x) const {
  Value y = num::matmul(x, tape.param(*weight));
  if (bias) y = num::add_row(y, tape.param(*bias));
  return y;
}

MultiHeadAttention MultiHeadAttention::create(ParamStore& store, const std::string& name,
                                              std::size_t dim, std::size_t heads, Rng& rng) {
  if (heads == 0 || dim % heads != 0) {
    throw std::invalid_argument(name + ": dimension " + std::to_string(dim) +
                                " is not divisible by head count " + std::to_string(heads));
  }
  MultiHeadAttention a;
  a.query = Linear::create(store, name + ".wq", dim, dim, false, rng);
  a.key = Linear::create(store, name + ".wk", dim, dim, false, rng);
  a.value = Linear::create(store, name + ".wv", dim, dim, false, rng);
  a.heads = heads;
  return a;
}

namespace {

Value heads_slice(const Value& x, std::size_t h, std::size_t dz) {
  if (x.cols() == dz) return x;
  return num::slice_cols(x, h * dz, (h + 1) * dz);
}

Value head_scores(const Value& q, const Value& k, std::size_t h, std::size_t dz,
                  std::span<const std::uint8_t> mask) {
  const Value qh = heads_slice(q, h, dz);
  const Value kh = heads_slice(k, h, dz);
  Value scores = num::scale(num::matmul(qh, num::transpose(kh)), 1.0 / std::sqrt(static_cast<double>(dz)));
  return mask.empty() ? num::softmax(scores, 1) : num::masked_softmax_rows(scores, mask);
}

}  // namespace

Value MultiHeadAttention::operator()(Tape& tape, const Value& targets, const Value& sources,
                                     std::span<const std::uint8_t> mask) const {
  const Value q = query(tape, targets);
  const Value k = key(tape, sources);
  const Value v = value(tape, sources);
  const std::size_t dz = head_dim();
  if (heads == 1) return num::matmul(head_scores(q, k, 0, dz, mask), v);
  std::vector<Value> outs;
  outs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    outs.push_back(num::matmul(head_scores(q, k, h, dz, mask), heads_slice(v, h, dz)));
  }
  return num::concat_cols(outs);
}

std::vector<Value> MultiHeadAttention::weights(Tape& tape, const Value& targets, const Value& sources,
                                               std::span<const std::uint8_t> mask) const {
  const Value q = query(tape, targets);
  const Value k = key(tape, sources);
  std::vector<Value> out;
  for (std::size_t h = 0; h < heads; ++h) out.push_back(head_scores(q, k, h, head_dim(), mask));
  return out;
}

ResidualFusion ResidualFusion::create(ParamStore& store, const std::string& name, std::size_t dim,
                                      Rng& rng) {
  return ResidualFusion{Linear::create(store, name + ".proj", 2 * dim, dim, true, rng)};
}

Value ResidualFusion::operator()(Tape& tape, const Value& attended, const Value& state) const {
  return num::add(num::tanh(proj(tape, num::concat_cols({attended, state}))), state);
}

GatedFusion GatedFusion::create(ParamStore& store, const std::string& name, std::size_t dim, Rng& rng) {
  GatedFusion f;
  f.ffnn = Linear::create(store, name + ".ffnn", 2 * dim, dim, true, rng);
  f.gate = Linear::create(store, name + ".gate", dim, 1, true, rng);
  return f;
}

Value GatedFusion::operator()(Tape& tape, const Value& state, const Value& incoming) const {
  const Value z = num::tanh(ffnn(tape, num::concat_cols({state, incoming})));
  const Value gamma = num::sigmoid(gate(tape, z));
  return num::lerp_rows(state, z, gamma);
}

Lstm Lstm::create(ParamStore& store, const std::string& name, std::size_t in, std::size_t hidden,
                  Rng& rng) {
  Lstm l;
  l.input = Linear::create(store, name + ".wx", in, 4 * hidden, true, rng);
  l.recurrent = Linear::create(store, name + ".wh", hidden, 4 * hidden, false, rng);
  l.hidden = hidden;
  return l;
}

Value Lstm::operator()(Tape& tape, const Value& sequence, bool reverse) const {
  const std::size_t m = sequence.rows();
  const std::size_t h = hidden;
  const Value projected = input(tape, sequence);  // [m × 4h]
  const Value wh = tape.param(*recurrent.weight);
  std::vector<Value> states(m);
  Value h_prev;
  Value c_prev;
  for (std::size_t step = 0; step < m; ++step) {
    const std::size_t t = reverse ? m - 1 - step : step;
    Value pre = num::slice_rows(projected, t, t + 1);
    if (step > 0) pre = num::add(pre, num::matmul(h_prev, wh));
    const Value i = num::sigmoid(num::slice_cols(pre, 0, h));
    const Value f = num::sigmoid(num::slice_cols(pre, h, 2 * h));
    const Value g = num::tanh(num::slice_cols(pre, 2 * h, 3 * h));
    const Value o = num::sigmoid(num::slice_cols(pre, 3 * h, 4 * h));
    Value c = num::mul(i, g);
    if (step > 0) c = num::add(num::mul(f, c_prev), c);
    h_prev = num::mul(o, num::tanh(c));
    c_prev = c;
    states[t] = h_prev;
  }
  return m == 1 ? states[0] : num::concat_rows(states);
}

BiLstm BiLstm::create(ParamStore& store, const std::string& name, std::size_t in, std::size_t hidden,
                      Rng& rng) {
  return BiLstm{Lstm::create(store, name + ".fwd", in, hidden, rng),
                Lstm::create(store, name + ".bwd", in, hidden, rng)};
}

Value BiLstm::operator()(Tape& tape, const Value& sequence) const {
  return num::concat_cols({forward(tape, sequence, false), backward(tape, sequence, true)});
}

}  // namespace cgsn::nn
