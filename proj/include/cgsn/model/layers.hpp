// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Building blocks shared by the encoder and the graph networks.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cgsn/numerics/ops.hpp"
#include "cgsn/numerics/params.hpp"

namespace cgsn::nn {

using num::Parameter;
using num::ParamStore;
using num::Rng;
using num::Tape;
using num::Value;

/// x · W + b with W stored [in × out].
struct Linear {
  const Parameter* weight = nullptr;
  const Parameter* bias = nullptr;

  static Linear create(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
                       bool with_bias, Rng& rng);
  Value operator()(Tape& tape, const Value& x) const;
  std::size_t in_features() const { return weight->shape()[0]; }
  std::size_t out_features() const { return weight->shape()[1]; }
};

/// Multi-head scaled dot-product attention from target rows onto source rows.
/// Head m uses column block m of W^Q, W^K, W^V; head outputs are concatenated without
/// an output projection.
struct MultiHeadAttention {
  Linear query;
  Linear key;
  Linear value;
  std::size_t heads = 1;

  static MultiHeadAttention create(ParamStore& store, const std::string& name, std::size_t dim,
                                   std::size_t heads, Rng& rng);

  // `mask` holds targets×sources bytes (row-major); empty means every pair is allowed.
  Value operator()(Tape& tape, const Value& targets, const Value& sources,
                   std::span<const std::uint8_t> mask = {}) const;
  // Attention weights of each head, [targets × sources] per head. Used by diagnostics and tests.
  std::vector<Value> weights(Tape& tape, const Value& targets, const Value& sources,
                             std::span<const std::uint8_t> mask = {}) const;

  std::size_t head_dim() const { return query.out_features() / heads; }
};

/// tanh([attended; state] · W + b) + state
struct ResidualFusion {
  Linear proj;

  static ResidualFusion create(ParamStore& store, const std::string& name, std::size_t dim, Rng& rng);
  Value operator()(Tape& tape, const Value& attended, const Value& state) const;
};

/// z = tanh([state; incoming] · W + b), γ = σ(z · w_g + b_g), out = (1 − γ)·state + γ·z.
/// One scalar gate per row.
struct GatedFusion {
  Linear ffnn;
  Linear gate;

  static GatedFusion create(ParamStore& store, const std::string& name, std::size_t dim, Rng& rng);
  Value operator()(Tape& tape, const Value& state, const Value& incoming) const;
};

/// Single-direction LSTM over the rows of a sequence. Gate order: input, forget, cell, output.
struct Lstm {
  Linear input;      // [in × 4h], with bias
  Linear recurrent;  // [h × 4h]
  std::size_t hidden = 0;

  static Lstm create(ParamStore& store, const std::string& name, std::size_t in, std::size_t hidden,
                     Rng& rng);
  // Hidden state of every step, [m × hidden], in input order.
  Value operator()(Tape& tape, const Value& sequence, bool reverse) const;
};

struct BiLstm {
  Lstm forward;
  Lstm backward;

  static BiLstm create(ParamStore& store, const std::string& name, std::size_t in, std::size_t hidden,
                       Rng& rng);
  // [m × 2·hidden]: forward states then backward states.
  Value operator()(Tape& tape, const Value& sequence) const;
};

}  // namespace cgsn::nn
