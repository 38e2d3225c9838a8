// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "../support/oracle.hpp"
#include "cgsn/model/layers.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using namespace cgsn;
using cgsn::oracle::Mat;

namespace {

num::Value random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return cgsn::testing::random_value({r, c}, rng);
}

void fill(num::ParamStore& store, const std::string& name, double v) {
  num::Parameter& p = store.get(name);
  p.assign(std::vector<double>(p.value().size(), v));
}

}  // namespace

TEST_CASE("linear computes xW + b") {
  num::ParamStore store;
  num::Rng rng(1);
  auto lin = nn::Linear::create(store, "l", 2, 2, true, rng);
  store.get("l.weight").assign({1, 2, 3, 4});
  store.get("l.bias").assign({0.5, -0.5});
  num::Tape tape;
  const auto y = lin(tape, num::Value::matrix(1, 2, {1.0, 1.0}));
  CHECK(y[0] == 4.5);
  CHECK(y[1] == 5.5);
}

TEST_CASE("multi-head attention matches the dense loop evaluation") {
  num::ParamStore store;
  num::Rng rng(3);
  auto mha = nn::MultiHeadAttention::create(store, "mha", 8, 2, rng);
  const auto targets = random_matrix(3, 8, 11);
  const auto sources = random_matrix(5, 8, 12);
  std::vector<std::uint8_t> mask(15, 0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) mask[i * 5 + j] = (i + j) % 2 == 0 || j == 4;
  num::Tape tape;
  const auto got = mha(tape, targets, sources, mask);
  const Mat want = oracle::attention(oracle::from(targets), oracle::from(sources), mha,
                                     [&](std::size_t i, std::size_t j) { return mask[i * 5 + j] != 0; });
  CHECK(oracle::max_abs_diff(want, got) < 1e-12);

  const auto weights = mha.weights(tape, targets, sources, mask);
  REQUIRE(weights.size() == 2);
  for (const auto& w : weights) {
    for (std::size_t i = 0; i < 3; ++i) {
      double total = 0;
      for (std::size_t j = 0; j < 5; ++j) {
        if (!mask[i * 5 + j]) CHECK(w.at(i, j) == 0.0);
        total += w.at(i, j);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("attention with one allowed source returns that source's value") {
  num::ParamStore store;
  num::Rng rng(4);
  auto mha = nn::MultiHeadAttention::create(store, "mha", 4, 2, rng);
  const auto targets = random_matrix(1, 4, 1);
  const auto sources = random_matrix(3, 4, 2);
  const std::vector<std::uint8_t> mask{0, 1, 0};
  num::Tape tape;
  const auto got = mha(tape, targets, sources, mask);
  const auto value = mha.value(tape, num::slice_rows(sources, 1, 2));
  for (std::size_t k = 0; k < 4; ++k) CHECK(got[k] == doctest::Approx(value[k]).epsilon(1e-14));
}

TEST_CASE("attention over identical sources is uniform") {
  num::ParamStore store;
  num::Rng rng(5);
  auto mha = nn::MultiHeadAttention::create(store, "mha", 4, 1, rng);
  const auto row = random_matrix(1, 4, 3);
  const auto sources = num::concat_rows({row, row, row, row});
  num::Tape tape;
  const auto w = mha.weights(tape, random_matrix(2, 4, 4), sources);
  for (std::size_t k = 0; k < w[0].size(); ++k) CHECK(w[0][k] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("attention rejects a dimension that heads do not divide") {
  num::ParamStore store;
  num::Rng rng(6);
  CHECK_THROWS_AS(nn::MultiHeadAttention::create(store, "mha", 6, 4, rng), std::invalid_argument);
}

TEST_CASE("residual fusion with zero weights is the identity") {
  num::ParamStore store;
  num::Rng rng(7);
  auto f = nn::ResidualFusion::create(store, "f", 4, rng);
  fill(store, "f.proj.weight", 0.0);
  fill(store, "f.proj.bias", 0.0);
  const auto state = random_matrix(3, 4, 8);
  num::Tape tape;
  const auto out = f(tape, random_matrix(3, 4, 9), state);
  for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == state[k]);
}

TEST_CASE("residual and gated fusion match the dense loops") {
  num::ParamStore store;
  num::Rng rng(8);
  auto rf = nn::ResidualFusion::create(store, "r", 6, rng);
  auto gf = nn::GatedFusion::create(store, "g", 6, rng);
  const auto a = random_matrix(4, 6, 1);
  const auto b = random_matrix(4, 6, 2);
  num::Tape tape;
  CHECK(oracle::max_abs_diff(oracle::residual_fusion(oracle::from(a), oracle::from(b), rf), rf(tape, a, b)) < 1e-12);
  CHECK(oracle::max_abs_diff(oracle::gated_fusion(oracle::from(a), oracle::from(b), gf), gf(tape, a, b)) < 1e-12);
}

TEST_CASE("gated fusion endpoints: a closed gate keeps the state, an open gate takes the candidate") {
  num::ParamStore store;
  num::Rng rng(9);
  auto gf = nn::GatedFusion::create(store, "g", 4, rng);
  const auto state = random_matrix(2, 4, 3);
  const auto incoming = random_matrix(2, 4, 4);
  fill(store, "g.gate.weight", 0.0);

  fill(store, "g.gate.bias", -1000.0);
  {
    num::Tape tape;
    const auto out = gf(tape, state, incoming);
    for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == state[k]);
  }
  fill(store, "g.gate.bias", 1000.0);
  {
    num::Tape tape;
    const auto out = gf(tape, state, incoming);
    const auto z = num::tanh(gf.ffnn(tape, num::concat_cols({state, incoming})));
    for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == doctest::Approx(z[k]).epsilon(1e-15));
  }
}

namespace {

// Reference LSTM over rows of x with gate order (i, f, g, o).
Mat lstm_loop(const Mat& x, const nn::Lstm& lstm, bool reverse) {
  const Mat wi = oracle::from(lstm.input.weight), bi = oracle::from(lstm.input.bias);
  const Mat wh = oracle::from(lstm.recurrent.weight);
  const std::size_t h = lstm.hidden;
  Mat out(x.r, h);
  std::vector<double> hp(h, 0.0), cp(h, 0.0);
  for (std::size_t step = 0; step < x.r; ++step) {
    const std::size_t t = reverse ? x.r - 1 - step : step;
    std::vector<double> pre(4 * h);
    for (std::size_t j = 0; j < 4 * h; ++j) {
      double s = bi.d[j];
      for (std::size_t k = 0; k < x.c; ++k) s += x(t, k) * wi(k, j);
      for (std::size_t k = 0; k < h; ++k) s += hp[k] * wh(k, j);
      pre[j] = s;
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double i = oracle::sigmoid(pre[j]), f = oracle::sigmoid(pre[h + j]);
      const double g = std::tanh(pre[2 * h + j]), o = oracle::sigmoid(pre[3 * h + j]);
      cp[j] = f * cp[j] + i * g;
      hp[j] = o * std::tanh(cp[j]);
      out(t, j) = hp[j];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("LSTM matches the reference recurrence in both directions") {
  num::ParamStore store;
  num::Rng rng(10);
  auto bi = nn::BiLstm::create(store, "bi", 4, 3, rng);
  const auto x = random_matrix(3, 4, 5);
  num::Tape tape;
  const auto out = bi(tape, x);
  REQUIRE(out.shape() == num::Shape{3, 6});
  const Mat fwd = lstm_loop(oracle::from(x), bi.forward, false);
  const Mat bwd = lstm_loop(oracle::from(x), bi.backward, true);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(out.at(t, j) == doctest::Approx(fwd(t, j)).epsilon(1e-13));
      CHECK(out.at(t, 3 + j) == doctest::Approx(bwd(t, j)).epsilon(1e-13));
    }
  }
}

TEST_CASE("BiLSTM over a single element") {
  num::ParamStore store;
  num::Rng rng(11);
  auto bi = nn::BiLstm::create(store, "bi", 4, 2, rng);
  num::Tape tape;
  const auto out = bi(tape, random_matrix(1, 4, 6));
  CHECK(out.shape() == num::Shape{1, 4});
}

TEST_CASE("layer gradients match finite differences") {
  num::ParamStore store;
  num::Rng rng(12);
  auto mha = nn::MultiHeadAttention::create(store, "mha", 4, 2, rng);
  auto bi = nn::BiLstm::create(store, "bi", 4, 2, rng);
  auto gf = nn::GatedFusion::create(store, "g", 4, rng);
  const std::vector<std::uint8_t> mask{1, 1, 0, 0, 1, 1};
  auto loss = [&](num::Tape& tape, const std::vector<num::Value>& in) {
    const auto att = mha(tape, in[0], in[1], mask);
    const auto seq = bi(tape, in[1]);
    return cgsn::testing::weighted_sum(num::concat_rows({gf(tape, in[0], att), seq}));
  };
  const double err = cgsn::testing::gradcheck(loss, {random_matrix(2, 4, 7), random_matrix(3, 4, 8)});
  CHECK(err < 1e-6);
}
