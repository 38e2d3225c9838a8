// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-segment four-level graph (token, sentence, paragraph, segment) with
// unidirectional lower→higher attention edges.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cgsn/model/encoder.hpp"
#include "cgsn/model/layers.hpp"

namespace cgsn {

enum class Level { kToken, kSentence, kParagraph, kSegment };

struct LocalEdge {
  Level from_level;
  std::size_t from;
  Level to_level;
  std::size_t to;
};

/// Node states of one segment. Sentence and token banks may be empty when every
/// paragraph of the segment is empty; their Values are then unset.
struct LocalGraph {
  num::Value tokens;      // [ℓ_k × d]
  num::Value sentences;   // [S × d]
  num::Value paragraphs;  // [P × d]
  num::Value segment;     // [1 × d]
  std::vector<std::size_t> token_sentence;      // sentence containing each token node
  std::vector<std::size_t> sentence_paragraph;  // paragraph containing each sentence node

  std::size_t token_count() const { return token_sentence.size(); }
  std::size_t sentence_count() const { return sentence_paragraph.size(); }
  std::size_t paragraph_count() const { return paragraphs.rows(); }

  // Cross-level edges followed by one self-loop per attention target.
  std::vector<LocalEdge> edges() const;
  // Token indices of each sentence (the sets S_i).
  std::vector<std::vector<std::size_t>> sentence_tokens() const;
};

// Token nodes from paragraph-token positions, sentence nodes by mean-pooling their tokens,
// paragraph nodes from the anchor position, segment node by mean-pooling paragraphs.
LocalGraph init_local_graph(const SegmentEncoding& enc);

// Row-major targets × (lower + targets) neighbourhood mask: a lower node is visible to the
// target that contains it, and each target sees itself.
std::vector<std::uint8_t> containment_mask(const std::vector<std::size_t>& owner, std::size_t targets);

/// BiLSTM over same-level nodes fused back through tanh(W[h_lstm; h] + b) + h.
struct LevelInteraction {
  nn::BiLstm lstm;
  nn::ResidualFusion fusion;

  static LevelInteraction create(num::ParamStore& store, const std::string& name, std::size_t dim,
                                 num::Rng& rng);
  num::Value operator()(num::Tape& tape, const num::Value& nodes) const;
};

/// Attention into one target level plus the fusion with the previous state.
struct LevelAttention {
  nn::MultiHeadAttention attention;
  nn::ResidualFusion fusion;
};

struct LocalHop {
  LevelAttention sentence;
  LevelAttention paragraph;
  LevelAttention segment;
};

struct LocalGraphConfig {
  std::size_t dim = 32;
  std::size_t heads = 4;
  std::size_t hops = 4;
};

class LocalGraphNetwork {
 public:
  static LocalGraphNetwork create(num::ParamStore& store, const LocalGraphConfig& config, num::Rng& rng);

  // Same-level interaction on token, sentence and paragraph nodes; the segment node is untouched.
  LocalGraph interact(num::Tape& tape, const LocalGraph& g) const;
  // One synchronous unidirectional attention hop using the parameters of hop `index`.
  LocalGraph hop(num::Tape& tape, const LocalGraph& g, std::size_t index) const;
  // `count` sequential hops (count ≤ configured hops).
  LocalGraph run_hops(num::Tape& tape, LocalGraph g, std::size_t count) const;

  const LocalGraphConfig& config() const { return config_; }

  LevelInteraction token_level;
  LevelInteraction sentence_level;
  LevelInteraction paragraph_level;
  std::vector<LocalHop> hops;

 private:
  LocalGraphConfig config_;
};

}  // namespace cgsn
