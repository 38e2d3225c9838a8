// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>

#include "cgsn/model/encoder.hpp"

namespace cgsn {

SegmentEncoding layout_segment(std::span<const int> question, std::span<const TokenizedParagraph> segment,
                               std::size_t max_len, ParagraphAnchor anchor) {
  if (segment.empty()) throw std::invalid_argument("encode_segment: segment has zero paragraphs");
  SegmentEncoding enc;
  enc.max_len = max_len;
  for (std::size_t p = 0; p < segment.size(); ++p) {
    std::vector<int> flat;
    for (const auto& s : segment[p].sentences) flat.insert(flat.end(), s.begin(), s.end());
    auto ids = format_pair(question, flat, max_len);
    const std::size_t begin = question.size() + 2;
    const std::size_t kept = std::min(flat.size(), max_len - 3 - question.size());
    const std::size_t end = begin + kept;

    std::vector<int> sent(max_len, -1);
    std::vector<int> para(max_len, -1);
    std::size_t pos = begin;
    for (const auto& s : segment[p].sentences) {
      if (pos >= end) break;
      if (s.empty()) continue;
      const int sid = static_cast<int>(enc.sentence_paragraph.size());
      enc.sentence_paragraph.push_back(p);
      for (std::size_t k = 0; k < s.size() && pos < end; ++k, ++pos) {
        sent[pos] = sid;
        para[pos] = static_cast<int>(p);
      }
    }
    enc.cls_positions.push_back(0);
    enc.anchor_positions.push_back(anchor == ParagraphAnchor::kCls ? 0 : end);
    enc.paragraph_token_spans.emplace_back(begin, end);
    enc.pair_token_ids.push_back(std::move(ids));
    enc.token_sentence.push_back(std::move(sent));
    enc.token_paragraph.push_back(std::move(para));
  }
  return enc;
}

ToyEncoder ToyEncoder::create(num::ParamStore& store, const EncoderConfig& config, num::Rng& rng) {
  if (config.vocab_size <= static_cast<std::size_t>(Vocabulary::kReserved)) {
    throw std::invalid_argument("encoder: vocabulary holds no regular tokens");
  }
  ToyEncoder e;
  e.config_ = config;
  e.token_embedding = &store.create("encoder.token_embedding", {config.vocab_size, config.embed_dim},
                                    num::Init::kNormalSmall, rng);
  e.position_embedding = &store.create("encoder.position_embedding", {config.max_len, config.hidden_dim},
                                       num::Init::kNormalSmall, rng);
  if (config.embed_dim != config.hidden_dim) {
    e.input_projection =
        nn::Linear::create(store, "encoder.input_projection", config.embed_dim, config.hidden_dim, false, rng);
  }
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string name = "encoder.layer" + std::to_string(l);
    e.layers.push_back(Layer{
        nn::MultiHeadAttention::create(store, name + ".attn", config.hidden_dim, config.heads, rng),
        nn::Linear::create(store, name + ".ffn", config.hidden_dim, config.hidden_dim, true, rng)});
  }
  return e;
}

SegmentEncoding ToyEncoder::encode(num::Tape& tape, std::span<const int> question,
                                   std::span<const TokenizedParagraph> segment) const {
  SegmentEncoding enc = layout_segment(question, segment, config_.max_len, config_.anchor);
  enc.dim = config_.hidden_dim;
  const std::size_t pairs = enc.paragraph_count();
  const std::size_t len = config_.max_len;
  const std::size_t total = pairs * len;

  std::vector<std::size_t> ids;
  std::vector<std::size_t> positions;
  ids.reserve(total);
  positions.reserve(total);
  for (const auto& pair : enc.pair_token_ids) {
    for (std::size_t t = 0; t < len; ++t) {
      if (pair[t] < 0 || static_cast<std::size_t>(pair[t]) >= config_.vocab_size) {
        throw std::out_of_range("encoder: token id " + std::to_string(pair[t]) + " outside vocabulary");
      }
      ids.push_back(static_cast<std::size_t>(pair[t]));
      positions.push_back(t);
    }
  }
  // Attention runs per pair over its non-PAD keys, which equals the block-diagonal form.
  std::vector<std::vector<std::uint8_t>> masks(pairs, std::vector<std::uint8_t>(len * len, 0));
  for (std::size_t p = 0; p < pairs; ++p) {
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t j = 0; j < len; ++j) masks[p][i * len + j] = enc.pair_token_ids[p][j] != Vocabulary::kPad;
    }
  }

  num::Value x = num::gather_rows(tape.param(*token_embedding), ids);
  if (input_projection.weight) x = input_projection(tape, x);
  x = num::add(x, num::gather_rows(tape.param(*position_embedding), positions));
  for (const auto& layer : layers) {
    std::vector<num::Value> attended;
    attended.reserve(pairs);
    for (std::size_t p = 0; p < pairs; ++p) {
      const num::Value block = pairs == 1 ? x : num::slice_rows(x, p * len, (p + 1) * len);
      attended.push_back(layer.attention(tape, block, block, masks[p]));
    }
    x = num::add(x, pairs == 1 ? attended.front() : num::concat_rows(attended));
    x = num::add(x, num::tanh(layer.feed_forward(tape, x)));
  }
  enc.hidden = num::reshape(x, {pairs, len, config_.hidden_dim});
  return enc;
}

}  // namespace cgsn
