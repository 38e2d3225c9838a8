// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>

#include "../support/oracle.hpp"
#include "cgsn/model/encoder.hpp"
#include "doctest.h"

using namespace cgsn;
using cgsn::oracle::Mat;

namespace {

constexpr int kCls = Vocabulary::kCls;
constexpr int kSep = Vocabulary::kSep;
constexpr int kPad = Vocabulary::kPad;

TokenizedParagraph paragraph(std::vector<std::vector<int>> sentences) { return TokenizedParagraph{std::move(sentences)}; }

// Embedding lookup, optional projection, position add, then per layer masked
// attention over the pair's non-PAD keys and a tanh feed-forward residual.
Mat encoder_loop(const ToyEncoder& enc, const std::vector<int>& ids) {
  const Mat emb = oracle::from(enc.token_embedding), pos = oracle::from(enc.position_embedding);
  const std::size_t len = ids.size();
  Mat x(len, emb.c);
  for (std::size_t t = 0; t < len; ++t)
    for (std::size_t k = 0; k < emb.c; ++k) x(t, k) = emb(static_cast<std::size_t>(ids[t]), k);
  if (enc.input_projection.weight) x = oracle::affine(x, enc.input_projection);
  for (std::size_t t = 0; t < len; ++t)
    for (std::size_t k = 0; k < x.c; ++k) x(t, k) += pos(t, k);
  for (const auto& layer : enc.layers) {
    const Mat att = oracle::attention(x, x, layer.attention, [&](std::size_t, std::size_t j) { return ids[j] != kPad; });
    for (std::size_t k = 0; k < x.d.size(); ++k) x.d[k] += att.d[k];
    const Mat ff = oracle::affine(x, layer.feed_forward);
    for (std::size_t k = 0; k < x.d.size(); ++k) x.d[k] += std::tanh(ff.d[k]);
  }
  return x;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits punctuation") {
  CHECK(tokenize("Hello, World!") == std::vector<std::string>{"hello", ",", "world", "!"});
  CHECK(tokenize("  ").empty());
}

TEST_CASE("split_sentences breaks after terminal punctuation") {
  const auto s = split_sentences("One two. Three? Four");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "One two.");
  CHECK(s[2] == "Four");
}

TEST_CASE("vocabulary from two short texts") {
  const std::vector<std::string> corpus{"a b", "b c"};
  const Vocabulary v = build_vocab(corpus);
  CHECK(v.size() == 7);
  CHECK(v.id("a") == 4);
  CHECK(v.id("b") == 5);
  CHECK(v.id("c") == 6);
  CHECK(v.id("zzz") == Vocabulary::kUnk);
  const Vocabulary again = build_vocab(corpus);
  CHECK(again.tokens() == v.tokens());
  CHECK(again.fingerprint() == v.fingerprint());
}

TEST_CASE("vocabulary errors and file round trip") {
  CHECK_THROWS_AS(build_vocab(std::vector<std::string>{}), std::invalid_argument);
  const Vocabulary v = build_vocab(std::vector<std::string>{"x y z"});
  const auto path = (std::filesystem::temp_directory_path() / "cgsn_vocab_test.txt").string();
  v.save(path);
  const Vocabulary back = Vocabulary::load(path);
  CHECK(back.tokens() == v.tokens());
  std::filesystem::remove(path);
}

TEST_CASE("format_pair layout, empty paragraph and truncation") {
  const Vocabulary v = build_vocab(std::vector<std::string>{"a b"});
  const int a = v.id("a"), b = v.id("b");
  CHECK(format_pair("a", "b", v, 6) == std::vector<int>{kCls, a, kSep, b, kSep, kPad});
  CHECK(format_pair("a", "", v, 6) == std::vector<int>{kCls, a, kSep, kSep, kPad, kPad});
  CHECK(format_pair("a", "b b b b b", v, 6) == std::vector<int>{kCls, a, kSep, b, b, kSep});
  CHECK_THROWS_AS(format_pair("a a a a", "b", v, 6), std::invalid_argument);
}

TEST_CASE("layout marks paragraph tokens, sentences and anchors") {
  const std::vector<int> q{4};
  const std::vector<TokenizedParagraph> seg{paragraph({{5, 6}, {7}}), paragraph({{8}})};
  const auto enc = layout_segment(q, seg, 8, ParagraphAnchor::kCls);
  CHECK(enc.paragraph_count() == 2);
  CHECK(enc.sentence_paragraph == std::vector<std::size_t>{0, 0, 1});
  CHECK(enc.token_sentence[0] == std::vector<int>{-1, -1, -1, 0, 0, 1, -1, -1});
  CHECK(enc.token_sentence[1] == std::vector<int>{-1, -1, -1, 2, -1, -1, -1, -1});
  CHECK(enc.paragraph_token_spans[0] == std::pair<std::size_t, std::size_t>{3, 6});
  CHECK(enc.anchor_positions == std::vector<std::size_t>{0, 0});
  const auto last = layout_segment(q, seg, 8, ParagraphAnchor::kLastSep);
  CHECK(last.anchor_positions == std::vector<std::size_t>{6, 4});
  CHECK_THROWS_AS(layout_segment(q, std::vector<TokenizedParagraph>{}, 8, ParagraphAnchor::kCls), std::invalid_argument);
}

TEST_CASE("encoder output shape at desk dimensions") {
  num::ParamStore store;
  num::Rng rng(1);
  EncoderConfig cfg;
  cfg.vocab_size = 20;
  cfg.max_len = 64;
  cfg.hidden_dim = 32;
  const auto enc = ToyEncoder::create(store, cfg, rng);
  std::vector<TokenizedParagraph> seg(16, paragraph({{5, 6, 7}, {8}}));
  const std::vector<int> q{9, 10};
  num::Tape tape = num::Tape::inference();
  const auto out = enc.encode(tape, q, seg);
  CHECK(out.hidden.shape() == num::Shape{16, 64, 32});
  const auto again = enc.encode(tape, q, seg);
  for (std::size_t k = 0; k < out.hidden.size(); ++k) REQUIRE(out.hidden[k] == again.hidden[k]);
}

TEST_CASE("encoder on a two-token pair equals the hand-rolled forward") {
  for (const std::size_t embed : {4u, 3u}) {
    num::ParamStore store;
    num::Rng rng(2);
    EncoderConfig cfg;
    cfg.vocab_size = 8;
    cfg.embed_dim = embed;
    cfg.hidden_dim = 4;
    cfg.heads = 2;
    cfg.max_len = 6;
    cfg.layers = 1;
    const auto enc = ToyEncoder::create(store, cfg, rng);
    // Larger embeddings than the default init so the attention is far from uniform.
    for (auto* p : store.all()) {
      std::vector<double> d(p->value().data().begin(), p->value().data().end());
      for (auto& x : d) x *= 20.0;
      p->assign(d);
    }
    const std::vector<int> q{4};
    const std::vector<TokenizedParagraph> seg{paragraph({{5}})};
    num::Tape tape;
    const auto out = enc.encode(tape, q, seg);
    const Mat want = encoder_loop(enc, out.pair_token_ids[0]);
    CHECK(out.pair_token_ids[0] == std::vector<int>{kCls, 4, kSep, 5, kSep, kPad});
    CHECK(oracle::max_abs_diff(want, out.hidden) < 1e-12);
  }
}

TEST_CASE("pairs in one segment do not attend to each other") {
  num::ParamStore store;
  num::Rng rng(3);
  EncoderConfig cfg;
  cfg.vocab_size = 12;
  cfg.hidden_dim = 8;
  cfg.embed_dim = 8;
  cfg.heads = 2;
  cfg.max_len = 8;
  cfg.layers = 2;
  const auto enc = ToyEncoder::create(store, cfg, rng);
  const std::vector<int> q{4};
  num::Tape tape;
  const auto both = enc.encode(tape, q, std::vector<TokenizedParagraph>{paragraph({{5, 6}}), paragraph({{7, 8, 9}})});
  const auto alone = enc.encode(tape, q, std::vector<TokenizedParagraph>{paragraph({{7, 8, 9}})});
  for (std::size_t k = 0; k < alone.hidden.size(); ++k) CHECK(both.hidden[8 * 8 + k] == alone.hidden[k]);
  const Mat want = encoder_loop(enc, both.pair_token_ids[0]);
  CHECK(oracle::max_abs_diff(want, num::slice_rows(num::reshape(both.hidden, {16, 8}), 0, 8)) < 1e-12);
}

TEST_CASE("encoder rejects token ids outside the vocabulary") {
  num::ParamStore store;
  num::Rng rng(4);
  EncoderConfig cfg;
  cfg.vocab_size = 6;
  cfg.max_len = 8;
  cfg.hidden_dim = 4;
  cfg.embed_dim = 4;
  cfg.heads = 2;
  const auto enc = ToyEncoder::create(store, cfg, rng);
  num::Tape tape;
  CHECK_THROWS_AS(enc.encode(tape, std::vector<int>{4}, std::vector<TokenizedParagraph>{paragraph({{9}})}),
                  std::out_of_range);
}
