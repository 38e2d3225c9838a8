// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Tokenization, vocabulary, question–paragraph pair formatting and the toy contextual
// encoder that produces per-segment hidden states.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cgsn/model/layers.hpp"

namespace cgsn {

// Lowercases, splits on whitespace and emits every ASCII punctuation character as its own token.
std::vector<std::string> tokenize(std::string_view text);
// Splits on '.', '?', '!' (the terminator stays with its sentence). Blank pieces are dropped.
std::vector<std::string> split_sentences(std::string_view text);

class Vocabulary {
 public:
  static constexpr int kCls = 0;
  static constexpr int kSep = 1;
  static constexpr int kPad = 2;
  static constexpr int kUnk = 3;
  static constexpr int kReserved = 4;

  Vocabulary() = default;
  // Tokens take ids kReserved, kReserved + 1, ... in the given order.
  explicit Vocabulary(std::vector<std::string> tokens);

  int id(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return kReserved + tokens_.size(); }
  // Regular tokens only, in id order.
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> encode(std::string_view text) const;

  // One token per line; line k holds id k + kReserved.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);
  // FNV-1a over the token list.
  std::string fingerprint() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Tokens seen at least `min_freq` times, in order of first appearance.
Vocabulary build_vocab(std::span<const std::string> corpus, std::size_t min_freq = 1);

// [CLS] q [SEP] p [SEP] [PAD]...; the paragraph is cut from the right to fit `max_len`.
std::vector<int> format_pair(std::span<const int> question, std::span<const int> paragraph,
                             std::size_t max_len);
std::vector<int> format_pair(std::string_view question, std::string_view paragraph,
                             const Vocabulary& vocab, std::size_t max_len);

/// A paragraph as token ids grouped by sentence.
struct TokenizedParagraph {
  std::vector<std::vector<int>> sentences;
  std::size_t token_count() const;
};

enum class ParagraphAnchor { kCls, kLastSep };

/// Encoder output for one segment of paragraphs.
struct SegmentEncoding {
  num::Value hidden;  // [paragraphs × max_len × dim]
  std::vector<std::vector<int>> pair_token_ids;
  // Per pair and position: segment-level sentence index, or -1 outside the paragraph text.
  std::vector<std::vector<int>> token_sentence;
  // Per pair and position: paragraph index, or -1 outside the paragraph text.
  std::vector<std::vector<int>> token_paragraph;
  std::vector<std::size_t> cls_positions;
  std::vector<std::size_t> anchor_positions;
  // [begin, end) positions of paragraph tokens in each pair.
  std::vector<std::pair<std::size_t, std::size_t>> paragraph_token_spans;
  std::vector<std::size_t> sentence_paragraph;  // owning paragraph of each sentence
  std::size_t max_len = 0;
  std::size_t dim = 0;

  std::size_t paragraph_count() const { return pair_token_ids.size(); }
  std::size_t sentence_count() const { return sentence_paragraph.size(); }
};

// Fills every field except `hidden`. Sentences cut entirely by truncation are dropped.
SegmentEncoding layout_segment(std::span<const int> question, std::span<const TokenizedParagraph> segment,
                               std::size_t max_len, ParagraphAnchor anchor);

/// Anything that turns a question and a run of paragraphs into token hidden states.
class SegmentEncoder {
 public:
  virtual ~SegmentEncoder() = default;
  virtual SegmentEncoding encode(num::Tape& tape, std::span<const int> question,
                                 std::span<const TokenizedParagraph> segment) const = 0;
  virtual std::size_t dim() const = 0;
};

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 32;   // d_w
  std::size_t hidden_dim = 32;  // d_h
  std::size_t heads = 4;
  std::size_t max_len = 64;     // ℓ_max
  std::size_t layers = 1;
  ParagraphAnchor anchor = ParagraphAnchor::kCls;
};

/// Token + position embeddings followed by `layers` blocks of
///   x ← x + MHA(x, x) over non-PAD keys of the same pair
///   x ← x + tanh(x · W + b)
/// With embed_dim ≠ hidden_dim the embeddings pass through a projection first.
class ToyEncoder final : public SegmentEncoder {
 public:
  struct Layer {
    nn::MultiHeadAttention attention;
    nn::Linear feed_forward;
  };

  static ToyEncoder create(num::ParamStore& store, const EncoderConfig& config, num::Rng& rng);

  SegmentEncoding encode(num::Tape& tape, std::span<const int> question,
                         std::span<const TokenizedParagraph> segment) const override;
  std::size_t dim() const override { return config_.hidden_dim; }
  const EncoderConfig& config() const { return config_; }

  const num::Parameter* token_embedding = nullptr;     // [|V| × d_w]
  const num::Parameter* position_embedding = nullptr;  // [max_len × d_h]
  nn::Linear input_projection;                         // only when d_w ≠ d_h
  std::vector<Layer> layers;

 private:
  EncoderConfig config_;
};

}  // namespace cgsn
