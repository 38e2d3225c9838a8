// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "cgsn/numerics/adam.hpp"
#include "cgsn/numerics/ops.hpp"
#include "gradcheck.hpp"

using namespace cgsn;
using num::Value;

namespace {

bool all_close(const Value& a, const Value& b, double tol) {
  if (a.shape() != b.shape()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("matmul examples") {
  const Value b = Value::matrix(2, 2, {5, 6, 7, 8});
  CHECK(all_close(num::matmul(Value::matrix(2, 2, {1, 0, 0, 1}), b), b, 0));
  CHECK(all_close(num::matmul(Value::zeros({2, 2}), b), Value::zeros({2, 2}), 0));
  const Value p = num::matmul(Value::matrix(2, 2, {1, 2, 3, 4}), b);
  CHECK(p[0] == 19);
  CHECK(p[1] == 22);
  CHECK(p[2] == 43);
  CHECK(p[3] == 50);
}

TEST_CASE("matmul shape mismatch names both shapes") {
  try {
    num::matmul(Value::zeros({2, 3}), Value::zeros({2, 3}));
    FAIL("expected a dimension error");
  } catch (const num::DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(2,3)") != std::string::npos);
  }
}

TEST_CASE("values reject zero extents") {
  CHECK_THROWS_AS(Value::zeros({0, 3}), std::invalid_argument);
}

TEST_CASE("softmax examples") {
  const Value s = num::softmax(Value({3}, {1, 1, 1}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(s[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(num::softmax(Value({1}, {-4.2}))[0] == 1.0);
  const Value t = num::softmax(Value({3}, {1, 2, 3}));
  CHECK(std::abs(t[0] - 0.0900305731703805) < 1e-12);
  CHECK(std::abs(t[1] - 0.2447284710547976) < 1e-12);
  CHECK(std::abs(t[2] - 0.6652409557748219) < 1e-12);
}

TEST_CASE("softmax sums to one and is shift invariant") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Value v = testing::random_value({4, 7}, rng, 10.0);
    const Value s = num::softmax(v);
    for (std::size_t r = 0; r < 4; ++r) {
      double total = 0;
      for (std::size_t c = 0; c < 7; ++c) {
        CHECK(s.at(r, c) >= 0);
        total += s.at(r, c);
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
    const Value shifted = num::softmax(num::add(v, Value::full({4, 7}, 123.5)));
    CHECK(all_close(s, shifted, 1e-12));
  }
}

TEST_CASE("softmax along axis 0") {
  const Value s = num::softmax(Value::matrix(2, 2, {0, 5, 0, 5}), 0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(s[i] == doctest::Approx(0.5));
}

TEST_CASE("masked softmax zeroes masked entries and rejects empty rows") {
  const std::vector<std::uint8_t> mask{1, 0, 1, 0, 1, 0};
  const Value s = num::masked_softmax_rows(Value::matrix(2, 3, {1, 100, 1, 2, 3, 4}), mask);
  CHECK(s.at(0, 1) == 0.0);
  CHECK(s.at(0, 0) == doctest::Approx(0.5));
  CHECK(s.at(1, 1) == 1.0);
  const std::vector<std::uint8_t> dead{1, 1, 1, 0, 0, 0};
  CHECK_THROWS(num::masked_softmax_rows(Value::matrix(2, 3, {1, 2, 3, 4, 5, 6}), dead));
}

TEST_CASE("backward of a product and a sum") {
  num::Tape tape;
  const Value x = tape.leaf(Value::scalar(3.0));
  const Value y = tape.leaf(Value::scalar(-2.0));
  const auto g = tape.backward(num::mul(x, y));
  CHECK(g.of(x)[0] == -2.0);
  CHECK(g.of(y)[0] == 3.0);

  num::Tape t2;
  const Value v = t2.leaf(Value({4}, {1, 2, 3, 4}));
  const Value unused = t2.leaf(Value({2}, {1, 1}));
  const auto g2 = t2.backward(num::sum(v));
  for (double d : g2.of(v)) CHECK(d == 1.0);
  for (double d : g2.of(unused)) CHECK(d == 0.0);
}

TEST_CASE("backward rejects a non-scalar loss") {
  num::Tape tape;
  const Value v = tape.leaf(Value({2}, {1, 2}));
  CHECK_THROWS(tape.backward(num::tanh(v)));
}

TEST_CASE("softmax then dot matches finite differences") {
  std::mt19937_64 rng(11);
  const Value v = testing::random_value({5}, rng);
  const Value w = testing::random_value({5}, rng);
  const double err = testing::gradcheck(
      [&](num::Tape&, const std::vector<Value>& in) { return num::sum(num::mul(num::softmax(in[0]), w)); }, {v});
  CHECK(err < 1e-6);
}

TEST_CASE("composite op gradients match finite differences") {
  std::mt19937_64 rng(5);
  using In = std::vector<Value>;
  auto check = [](const testing::LossFn& f, In in) {
    const double err = testing::gradcheck(f, std::move(in));
    CHECK(err < 1e-5);
  };
  const Value a = testing::random_value({3, 4}, rng);
  const Value b = testing::random_value({4, 2}, rng);
  const Value c = testing::random_value({3, 4}, rng);
  const Value row = testing::random_value({4}, rng);
  const Value gate = testing::random_value({3, 1}, rng);

  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::matmul(x[0], x[1])); }, {a, b});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::transpose(x[0])); }, {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::sub(num::add(x[0], x[1]), num::mul(x[0], x[1]))); },
        {a, c});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::scale(x[0], -1.7)); }, {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::add_row(x[0], x[1])); }, {a, row});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::scale_rows(x[0], x[1])); }, {a, gate});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::lerp_rows(x[0], x[1], num::sigmoid(x[2]))); },
        {a, c, gate});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::tanh(x[0])); }, {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::sigmoid(x[0])); }, {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::softmax(x[0])); }, {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::softmax(x[0], 0)); }, {a});
  check(
      [](num::Tape&, const In& x) {
        const std::vector<std::uint8_t> mask{1, 0, 1, 1, 0, 1, 1, 1, 1, 0, 0, 1};
        return testing::weighted_sum(num::masked_softmax_rows(x[0], mask));
      },
      {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::concat_cols({x[0], x[1], x[0]})); }, {a, c});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::concat_rows({x[0], x[1]})); }, {a, c});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::slice_cols(x[0], 1, 3)); }, {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::slice_rows(x[0], 1, 3)); }, {a});
  check(
      [](num::Tape&, const In& x) {
        const std::vector<std::size_t> rows{2, 0, 2, 1};
        return testing::weighted_sum(num::gather_rows(x[0], rows));
      },
      {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::reshape(x[0], {2, 6})); }, {a});
  check([](num::Tape&, const In& x) { return testing::weighted_sum(num::mean_rows(x[0])); }, {a});
  check(
      [](num::Tape&, const In& x) {
        const std::vector<int> labels{1, 0, 1, 1};
        return num::bce_with_logits(x[0], labels);
      },
      {row});
}

TEST_CASE("binary cross entropy examples") {
  const std::vector<int> zeros{0, 1, 0};
  CHECK(num::bce_with_logits(Value({3}, {0.0, 0.0, 0.0}), zeros).item() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const std::vector<int> one{1};
  CHECK(num::bce_with_logits(Value({1}, {50}), one).item() < 1e-20);
  const std::vector<int> labels{1, 0, 1};
  const double expected = (2 * std::log1p(std::exp(-1.0)) + std::log(2.0)) / 3;
  CHECK(std::abs(num::bce_with_logits(Value({3}, {1, -1, 0}), labels).item() - expected) < 1e-15);
  CHECK(std::abs(expected - 0.439890185198797) < 1e-15);
  const std::vector<int> bad{2};
  CHECK_THROWS(num::bce_with_logits(Value({1}, {0.0}), bad));
}

TEST_CASE("backward is deterministic") {
  std::mt19937_64 rng(8);
  const Value a = testing::random_value({6, 6}, rng);
  auto run = [&] {
    num::Tape tape;
    const Value x = tape.leaf(a);
    const Value y = num::softmax(num::matmul(num::tanh(x), num::transpose(x)));
    return tape.backward(testing::weighted_sum(y)).of(x);
  };
  CHECK(run() == run());
}

TEST_CASE("adam examples") {
  num::Rng rng(0);
  SUBCASE("zero gradient without decay leaves parameters unchanged") {
    num::ParamStore store;
    auto& p = store.add("p", Value({2}, {0.3, -0.4}));
    p.grad = {0, 0};
    num::AdamState s;
    s.learning_rate = 0.1;
    s.weight_decay = 0;
    std::vector<num::Parameter*> ps{&p};
    num::adam_step(ps, s);
    CHECK(p.value()[0] == 0.3);
    CHECK(p.value()[1] == -0.4);
    CHECK(s.step == 1);
  }
  SUBCASE("first step moves by the learning rate") {
    num::ParamStore store;
    auto& p = store.add("p", Value::scalar(0.0));
    p.grad = {1.0};
    num::AdamState s;
    s.learning_rate = 0.1;
    s.weight_decay = 0;
    std::vector<num::Parameter*> ps{&p};
    num::adam_step(ps, s);
    CHECK(std::abs(p.value()[0] + 0.1) < 1e-8);
  }
  SUBCASE("decoupled decay only") {
    num::ParamStore store;
    auto& p = store.add("p", Value::scalar(1.0));
    p.grad = {0.0};
    num::AdamState s;
    s.learning_rate = 0.1;
    s.weight_decay = 0.01;
    std::vector<num::Parameter*> ps{&p};
    num::adam_step(ps, s);
    CHECK(std::abs(p.value()[0] - 0.999) < 1e-15);
  }
  SUBCASE("gradient shape mismatch throws") {
    num::ParamStore store;
    auto& p = store.add("p", Value({2}, {0.0, 0.0}));
    p.grad = {1.0, 2.0, 3.0};
    num::AdamState s;
    std::vector<num::Parameter*> ps{&p};
    CHECK_THROWS(num::adam_step(ps, s));
  }
}

TEST_CASE("memory meter tracks live buffers") {
  const std::size_t before = num::MemoryMeter::live_bytes();
  {
    const Value big = Value::zeros({100, 100});
    CHECK(num::MemoryMeter::live_bytes() >= before + 100 * 100 * sizeof(double));
  }
  CHECK(num::MemoryMeter::live_bytes() == before);
}
