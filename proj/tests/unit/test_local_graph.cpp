// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "../support/oracle.hpp"
#include "cgsn/model/local_graph.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using namespace cgsn;
using cgsn::oracle::Mat;

namespace {

TokenizedParagraph paragraph(std::vector<std::vector<int>> sentences) { return TokenizedParagraph{std::move(sentences)}; }

// Layout of `seg` with random hidden states in place of an encoder.
SegmentEncoding random_encoding(const std::vector<TokenizedParagraph>& seg, std::size_t len, std::size_t dim,
                                std::uint64_t seed) {
  SegmentEncoding enc = layout_segment(std::vector<int>{4}, seg, len, ParagraphAnchor::kCls);
  std::mt19937_64 rng(seed);
  enc.hidden = cgsn::testing::random_value({seg.size(), len, dim}, rng);
  enc.dim = dim;
  return enc;
}

oracle::DenseLocal dense(const LocalGraph& g) {
  return {oracle::from(g.tokens), oracle::from(g.sentences), oracle::from(g.paragraphs), oracle::from(g.segment)};
}

bool rows_equal(const num::Value& a, const num::Value& b, std::size_t row) {
  for (std::size_t k = 0; k < a.cols(); ++k)
    if (a.at(row, k) != b.at(row, k)) return false;
  return true;
}

bool equal(const num::Value& a, const num::Value& b) {
  if (a.shape() != b.shape()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] != b[k]) return false;
  return true;
}

LocalGraph with_value(LocalGraph g, Level level, std::size_t row, double delta) {
  num::Value& v = level == Level::kToken      ? g.tokens
                  : level == Level::kSentence ? g.sentences
                  : level == Level::kParagraph ? g.paragraphs
                                               : g.segment;
  std::vector<double> d(v.data().begin(), v.data().end());
  for (std::size_t k = 0; k < v.cols(); ++k) d[row * v.cols() + k] += delta;
  v = num::Value(v.shape(), std::move(d));
  return g;
}

}  // namespace

TEST_CASE("sentence node of a two-token sentence is the mean of its tokens") {
  const auto enc = random_encoding({paragraph({{5, 6}})}, 8, 4, 1);
  const LocalGraph g = init_local_graph(enc);
  REQUIRE(g.token_count() == 2);
  REQUIRE(g.sentence_count() == 1);
  for (std::size_t k = 0; k < 4; ++k) {
    const double ha = enc.hidden[3 * 4 + k], hb = enc.hidden[4 * 4 + k];
    CHECK(g.sentences[k] == doctest::Approx((ha + hb) / 2).epsilon(1e-15));
  }
}

TEST_CASE("segment node of identical paragraphs equals the paragraph node") {
  SegmentEncoding enc = layout_segment(std::vector<int>{4}, std::vector<TokenizedParagraph>(3, paragraph({{5}})), 6,
                                       ParagraphAnchor::kCls);
  std::mt19937_64 rng(2);
  const auto one = cgsn::testing::random_value({1, 6, 4}, rng);
  std::vector<double> d;
  for (int p = 0; p < 3; ++p) d.insert(d.end(), one.data().begin(), one.data().end());
  enc.hidden = num::Value({3, 6, 4}, d);
  const LocalGraph g = init_local_graph(enc);
  for (std::size_t k = 0; k < 4; ++k) CHECK(g.segment[k] == doctest::Approx(g.paragraphs.at(0, k)).epsilon(1e-15));
}

TEST_CASE("segment node is the mean of the three CLS states") {
  const auto enc = random_encoding({paragraph({{5}}), paragraph({{6, 7}}), paragraph({{8}, {9}})}, 8, 4, 3);
  const LocalGraph g = init_local_graph(enc);
  for (std::size_t k = 0; k < 4; ++k) {
    const double mean = (enc.hidden[0 * 32 + k] + enc.hidden[1 * 32 + k] + enc.hidden[2 * 32 + k]) / 3.0;
    CHECK(g.segment[k] == doctest::Approx(mean).epsilon(1e-14));
    CHECK(g.paragraphs.at(1, k) == enc.hidden[32 + k]);
  }
  CHECK(g.sentence_paragraph == std::vector<std::size_t>{0, 1, 2, 2});
}

TEST_CASE("a sentence without tokens is rejected") {
  auto enc = random_encoding({paragraph({{5}})}, 6, 4, 4);
  enc.sentence_paragraph.push_back(0);
  CHECK_THROWS_AS(init_local_graph(enc), std::invalid_argument);
}

TEST_CASE("edges point upward only, one per lower node, plus self-loops") {
  const auto enc = random_encoding({paragraph({{5, 6}, {7}}), paragraph({{8}})}, 8, 4, 5);
  const LocalGraph g = init_local_graph(enc);
  std::vector<int> token_out(g.token_count(), 0), sentence_out(g.sentence_count(), 0);
  std::size_t loops = 0;
  for (const auto& e : g.edges()) {
    CHECK(static_cast<int>(e.to_level) >= static_cast<int>(e.from_level));
    if (e.from_level == e.to_level) {
      CHECK(e.from == e.to);
      CHECK(e.from_level != Level::kToken);
      ++loops;
      continue;
    }
    CHECK(static_cast<int>(e.to_level) == static_cast<int>(e.from_level) + 1);
    if (e.from_level == Level::kToken) {
      ++token_out[e.from];
      CHECK(e.to == g.token_sentence[e.from]);
    }
    if (e.from_level == Level::kSentence) {
      ++sentence_out[e.from];
      CHECK(e.to == g.sentence_paragraph[e.from]);
    }
  }
  for (int c : token_out) CHECK(c == 1);
  for (int c : sentence_out) CHECK(c == 1);
  CHECK(loops == g.sentence_count() + g.paragraph_count() + 1);
  CHECK(g.sentence_tokens() == std::vector<std::vector<std::size_t>>{{0, 1}, {2}, {3}});
}

TEST_CASE("containment mask rows") {
  const auto m = containment_mask({0, 0, 1}, 2);
  CHECK(m == std::vector<std::uint8_t>{1, 1, 0, 1, 0, 0, 0, 1, 0, 1});
}

TEST_CASE("same-level interaction with zero weights is the identity") {
  num::ParamStore store;
  num::Rng rng(6);
  const auto li = LevelInteraction::create(store, "li", 4, rng);
  for (auto* p : store.all()) p->assign(std::vector<double>(p->value().size(), 0.0));
  std::mt19937_64 r(7);
  const auto x = cgsn::testing::random_value({3, 4}, r);
  num::Tape tape;
  CHECK(equal(li(tape, x), x));
  CHECK(equal(li(tape, num::slice_rows(x, 0, 1)), num::slice_rows(x, 0, 1)));
}

TEST_CASE("same-level interaction gradient over a single element") {
  num::ParamStore store;
  num::Rng rng(8);
  const auto li = LevelInteraction::create(store, "li", 4, rng);
  std::mt19937_64 r(9);
  auto loss = [&](num::Tape& tape, const std::vector<num::Value>& in) {
    return cgsn::testing::weighted_sum(li(tape, in[0]));
  };
  CHECK(cgsn::testing::gradcheck(loss, {cgsn::testing::random_value({1, 4}, r)}) < 1e-6);
  CHECK(cgsn::testing::gradcheck(loss, {cgsn::testing::random_value({3, 4}, r)}) < 1e-6);
}

TEST_CASE("local hop matches the dense full-adjacency evaluation") {
  num::ParamStore store;
  num::Rng rng(10);
  const auto net = LocalGraphNetwork::create(store, {4, 2, 2}, rng);
  SUBCASE("4 tokens, 2 sentences, 1 paragraph") {
    const LocalGraph g = init_local_graph(random_encoding({paragraph({{5, 6}, {7, 8}})}, 8, 4, 11));
    num::Tape tape;
    const LocalGraph out = net.hop(tape, g, 0);
    const auto want = oracle::local_hop(dense(g), g, net.hops[0]);
    CHECK(oracle::max_abs_diff(want.sentences, out.sentences) < 1e-9);
    CHECK(oracle::max_abs_diff(want.paragraphs, out.paragraphs) < 1e-9);
    CHECK(oracle::max_abs_diff(want.segment, out.segment) < 1e-9);
    CHECK(equal(out.tokens, g.tokens));
  }
  SUBCASE("two hops over 5 tokens, 3 sentences, 2 paragraphs") {
    const LocalGraph g = init_local_graph(random_encoding({paragraph({{5, 6}, {7}}), paragraph({{8, 9}})}, 8, 4, 12));
    num::Tape tape;
    const LocalGraph out = net.run_hops(tape, g, 2);
    const auto want = oracle::local_hop(oracle::local_hop(dense(g), g, net.hops[0]), g, net.hops[1]);
    CHECK(oracle::max_abs_diff(want.sentences, out.sentences) < 1e-9);
    CHECK(oracle::max_abs_diff(want.paragraphs, out.paragraphs) < 1e-9);
    CHECK(oracle::max_abs_diff(want.segment, out.segment) < 1e-9);
  }
}

TEST_CASE("a paragraph with only its self-loop fuses its own value") {
  num::ParamStore store;
  num::Rng rng(13);
  const auto net = LocalGraphNetwork::create(store, {4, 2, 1}, rng);
  const LocalGraph g = init_local_graph(random_encoding({paragraph({{5}}), paragraph({})}, 6, 4, 14));
  REQUIRE(g.sentence_paragraph == std::vector<std::size_t>{0});
  num::Tape tape;
  const LocalGraph out = net.hop(tape, g, 0);
  const auto self = num::slice_rows(g.paragraphs, 1, 2);
  const auto& level = net.hops[0].paragraph;
  const auto want = level.fusion(tape, level.attention.value(tape, self), self);
  for (std::size_t k = 0; k < 4; ++k) CHECK(out.paragraphs.at(1, k) == doctest::Approx(want[k]).epsilon(1e-14));
}

TEST_CASE("zero hops leave the graph unchanged and too many hops are rejected") {
  num::ParamStore store;
  num::Rng rng(15);
  const auto net = LocalGraphNetwork::create(store, {4, 2, 1}, rng);
  const LocalGraph g = init_local_graph(random_encoding({paragraph({{5, 6}})}, 6, 4, 16));
  num::Tape tape;
  const LocalGraph out = net.run_hops(tape, g, 0);
  CHECK(equal(out.sentences, g.sentences));
  CHECK(equal(out.paragraphs, g.paragraphs));
  CHECK(equal(out.segment, g.segment));
  CHECK_THROWS_AS(net.run_hops(tape, g, 2), std::out_of_range);
}

TEST_CASE("information flows upward one level per hop") {
  num::ParamStore store;
  num::Rng rng(17);
  const auto net = LocalGraphNetwork::create(store, {4, 2, 2}, rng);
  const LocalGraph g = init_local_graph(
      random_encoding({paragraph({{5, 6}, {7}}), paragraph({{8}}), paragraph({{9, 10}})}, 8, 4, 18));
  num::Tape tape;
  const LocalGraph base1 = net.hop(tape, g, 0);
  const LocalGraph base2 = net.run_hops(tape, g, 2);

  SUBCASE("the segment node never reaches lower levels") {
    const LocalGraph moved = net.run_hops(tape, with_value(g, Level::kSegment, 0, 0.5), 2);
    CHECK(equal(moved.tokens, base2.tokens));
    CHECK(equal(moved.sentences, base2.sentences));
    CHECK(equal(moved.paragraphs, base2.paragraphs));
    CHECK_FALSE(equal(moved.segment, base2.segment));
  }
  SUBCASE("a token moves only its own sentence after one hop") {
    const LocalGraph moved = net.hop(tape, with_value(g, Level::kToken, 2, 0.5), 0);
    CHECK_FALSE(rows_equal(moved.sentences, base1.sentences, 1));
    CHECK(rows_equal(moved.sentences, base1.sentences, 0));
    CHECK(rows_equal(moved.sentences, base1.sentences, 2));
    CHECK(equal(moved.paragraphs, base1.paragraphs));
    CHECK(equal(moved.segment, base1.segment));
  }
  SUBCASE("after two hops the token reaches its paragraph only") {
    const LocalGraph moved = net.run_hops(tape, with_value(g, Level::kToken, 2, 0.5), 2);
    CHECK_FALSE(rows_equal(moved.paragraphs, base2.paragraphs, 0));
    CHECK(rows_equal(moved.paragraphs, base2.paragraphs, 1));
    CHECK(rows_equal(moved.paragraphs, base2.paragraphs, 2));
  }
}
