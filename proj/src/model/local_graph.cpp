// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/model/local_graph.hpp"

#include <stdexcept>

namespace cgsn {

using num::Value;

std::vector<LocalEdge> LocalGraph::edges() const {
  std::vector<LocalEdge> out;
  for (std::size_t t = 0; t < token_count(); ++t)
    out.push_back({Level::kToken, t, Level::kSentence, token_sentence[t]});
  for (std::size_t s = 0; s < sentence_count(); ++s)
    out.push_back({Level::kSentence, s, Level::kParagraph, sentence_paragraph[s]});
  for (std::size_t p = 0; p < paragraph_count(); ++p)
    out.push_back({Level::kParagraph, p, Level::kSegment, 0});
  for (std::size_t s = 0; s < sentence_count(); ++s)
    out.push_back({Level::kSentence, s, Level::kSentence, s});
  for (std::size_t p = 0; p < paragraph_count(); ++p)
    out.push_back({Level::kParagraph, p, Level::kParagraph, p});
  out.push_back({Level::kSegment, 0, Level::kSegment, 0});
  return out;
}

std::vector<std::vector<std::size_t>> LocalGraph::sentence_tokens() const {
  std::vector<std::vector<std::size_t>> out(sentence_count());
  for (std::size_t t = 0; t < token_count(); ++t) out[token_sentence[t]].push_back(t);
  return out;
}

LocalGraph init_local_graph(const SegmentEncoding& enc) {
  const std::size_t pairs = enc.paragraph_count();
  const std::size_t len = enc.max_len;
  if (enc.hidden.rank() != 3 || enc.hidden.shape()[0] != pairs || enc.hidden.shape()[1] != len) {
    throw num::DimensionError("init_local_graph: hidden shape " + num::shape_str(enc.hidden.shape()) +
                              " does not match the segment layout");
  }
  const std::size_t dim = enc.hidden.shape()[2];
  const Value flat = num::reshape(enc.hidden, {pairs * len, dim});

  LocalGraph g;
  std::vector<std::size_t> token_rows;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto [begin, end] = enc.paragraph_token_spans[p];
    for (std::size_t pos = begin; pos < end; ++pos) {
      const int s = enc.token_sentence[p][pos];
      if (s < 0) throw std::logic_error("init_local_graph: paragraph token without a sentence");
      token_rows.push_back(p * len + pos);
      g.token_sentence.push_back(static_cast<std::size_t>(s));
    }
  }
  g.sentence_paragraph = enc.sentence_paragraph;
  const std::size_t sentences = g.sentence_count();

  if (!token_rows.empty()) {
    g.tokens = num::gather_rows(flat, token_rows);
    std::vector<std::size_t> sizes(sentences, 0);
    for (auto s : g.token_sentence) ++sizes[s];
    for (std::size_t s = 0; s < sentences; ++s) {
      if (sizes[s] == 0) {
        throw std::invalid_argument("init_local_graph: sentence " + std::to_string(s) + " has no tokens");
      }
    }
    std::vector<double> pool(sentences * token_rows.size(), 0.0);
    for (std::size_t t = 0; t < token_rows.size(); ++t) {
      const auto s = g.token_sentence[t];
      pool[s * token_rows.size() + t] = 1.0 / static_cast<double>(sizes[s]);
    }
    g.sentences = num::matmul(Value::matrix(sentences, token_rows.size(), std::move(pool)), g.tokens);
  } else if (sentences > 0) {
    throw std::invalid_argument("init_local_graph: sentences present without tokens");
  }

  std::vector<std::size_t> anchors;
  for (std::size_t p = 0; p < pairs; ++p) anchors.push_back(p * len + enc.anchor_positions[p]);
  g.paragraphs = num::gather_rows(flat, anchors);
  g.segment = num::mean_rows(g.paragraphs);
  return g;
}

std::vector<std::uint8_t> containment_mask(const std::vector<std::size_t>& owner, std::size_t targets) {
  const std::size_t cols = owner.size() + targets;
  std::vector<std::uint8_t> mask(targets * cols, 0);
  for (std::size_t k = 0; k < owner.size(); ++k) mask[owner[k] * cols + k] = 1;
  for (std::size_t t = 0; t < targets; ++t) mask[t * cols + owner.size() + t] = 1;
  return mask;
}

LevelInteraction LevelInteraction::create(num::ParamStore& store, const std::string& name,
                                          std::size_t dim, num::Rng& rng) {
  if (dim % 2 != 0) throw std::invalid_argument(name + ": BiLSTM needs an even node dimension");
  return LevelInteraction{nn::BiLstm::create(store, name + ".bilstm", dim, dim / 2, rng),
                          nn::ResidualFusion::create(store, name + ".fusion", dim, rng)};
}

Value LevelInteraction::operator()(num::Tape& tape, const Value& nodes) const {
  return fusion(tape, lstm(tape, nodes), nodes);
}

LocalGraphNetwork LocalGraphNetwork::create(num::ParamStore& store, const LocalGraphConfig& config,
                                            num::Rng& rng) {
  LocalGraphNetwork n;
  n.config_ = config;
  n.token_level = LevelInteraction::create(store, "local.interact.token", config.dim, rng);
  n.sentence_level = LevelInteraction::create(store, "local.interact.sentence", config.dim, rng);
  n.paragraph_level = LevelInteraction::create(store, "local.interact.paragraph", config.dim, rng);
  auto level = [&](const std::string& name) {
    return LevelAttention{nn::MultiHeadAttention::create(store, name + ".attn", config.dim, config.heads, rng),
                          nn::ResidualFusion::create(store, name + ".fusion", config.dim, rng)};
  };
  for (std::size_t h = 0; h < config.hops; ++h) {
    const std::string base = "local.hop" + std::to_string(h);
    n.hops.push_back(LocalHop{level(base + ".sentence"), level(base + ".paragraph"), level(base + ".segment")});
  }
  return n;
}

LocalGraph LocalGraphNetwork::interact(num::Tape& tape, const LocalGraph& g) const {
  LocalGraph out = g;
  if (g.token_count() > 0) out.tokens = token_level(tape, g.tokens);
  if (g.sentence_count() > 0) out.sentences = sentence_level(tape, g.sentences);
  out.paragraphs = paragraph_level(tape, g.paragraphs);
  return out;
}

namespace {

Value attend_level(num::Tape& tape, const LevelAttention& level, const Value& targets, const Value& lower,
                   const std::vector<std::size_t>& owner) {
  const auto mask = containment_mask(owner, targets.rows());
  const Value sources = owner.empty() ? targets : num::concat_rows({lower, targets});
  return level.fusion(tape, level.attention(tape, targets, sources, mask), targets);
}

}  // namespace

LocalGraph LocalGraphNetwork::hop(num::Tape& tape, const LocalGraph& g, std::size_t index) const {
  if (index >= hops.size()) {
    throw std::out_of_range("local hop " + std::to_string(index) + " of " + std::to_string(hops.size()));
  }
  const LocalHop& p = hops[index];
  LocalGraph out = g;
  if (g.sentence_count() > 0) {
    out.sentences = attend_level(tape, p.sentence, g.sentences, g.tokens, g.token_sentence);
  }
  out.paragraphs = attend_level(tape, p.paragraph, g.paragraphs, g.sentences, g.sentence_paragraph);
  const std::vector<std::size_t> to_segment(g.paragraph_count(), 0);
  out.segment = attend_level(tape, p.segment, g.segment, g.paragraphs, to_segment);
  return out;
}

LocalGraph LocalGraphNetwork::run_hops(num::Tape& tape, LocalGraph g, std::size_t count) const {
  if (count > hops.size()) {
    throw std::out_of_range("requested " + std::to_string(count) + " local hops, configured " +
                            std::to_string(hops.size()));
  }
  for (std::size_t h = 0; h < count; ++h) g = hop(tape, g, h);
  return g;
}

}  // namespace cgsn
