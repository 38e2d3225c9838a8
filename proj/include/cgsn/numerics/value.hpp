// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense 64-bit arrays with a reverse-mode differentiation record.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cgsn::num {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Process-wide accounting of bytes held by live tensor buffers.
class MemoryMeter {
 public:
  static std::size_t live_bytes();
  static std::size_t peak_bytes();
  // Resets the peak to the current live count.
  static void reset_peak();
};

namespace detail {

// Flat storage shared between Values. Counted by MemoryMeter.
class Buffer {
 public:
  explicit Buffer(std::size_t n, double fill = 0.0);
  explicit Buffer(std::vector<double> data);
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  ~Buffer();

  std::vector<double> data;
};

struct TapeImpl;

}  // namespace detail

using BufferPtr = std::shared_ptr<const detail::Buffer>;

class Tape;

/// Immutable dense array. Copies share storage.
class Value {
 public:
  Value();
  Value(Shape shape, std::vector<double> data);

  static Value zeros(Shape shape);
  static Value full(Shape shape, double v);
  static Value scalar(double v);
  static Value matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const;
  // Leading/trailing extents of a rank-2 value (rank-1 is treated as a single row).
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const;
  double operator[](std::size_t i) const { return buf_->data[i]; }
  double at(std::size_t r, std::size_t c) const { return buf_->data[r * cols() + c]; }
  double item() const;

  bool requires_grad() const { return node_ >= 0; }
  int node() const { return node_; }
  // Same storage, no differentiation record.
  Value detach() const;

  const BufferPtr& buffer() const { return buf_; }

 private:
  friend class Tape;
  friend class ParamStore;
  friend struct OpRecorder;

  Value(Shape shape, BufferPtr buf);

  Shape shape_;
  BufferPtr buf_;
  std::shared_ptr<detail::TapeImpl> tape_;
  int node_ = -1;
};

/// Gradient buffers keyed by tape node id.
class GradSink {
 public:
  explicit GradSink(std::vector<std::vector<double>>& grads, const std::vector<std::size_t>& sizes)
      : grads_(grads), sizes_(sizes) {}

  // Accumulation target for node `id`, allocated on first use. Returns empty span for id < 0.
  std::span<double> at(int id);

 private:
  std::vector<std::vector<double>>& grads_;
  const std::vector<std::size_t>& sizes_;
};

using BackwardFn = std::function<void(std::span<const double> grad_out, GradSink& sink)>;

class Parameter;

/// Result of a backward pass.
class Gradients {
 public:
  Gradients() = default;
  Gradients(std::vector<std::vector<double>> grads, std::vector<std::size_t> sizes)
      : grads_(std::move(grads)), sizes_(std::move(sizes)) {}

  // Gradient with respect to `v`; all zeros when `v` did not participate.
  std::vector<double> of(const Value& v) const;

 private:
  std::vector<std::vector<double>> grads_;
  std::vector<std::size_t> sizes_;
};

/// Ordered record of differentiable operations. One per forward pass.
class Tape {
 public:
  Tape();
  // A tape that records nothing; parameters enter as constants.
  static Tape inference();

  bool recording() const;
  std::size_t node_count() const;

  // Registers a differentiable leaf holding `v`'s data.
  Value leaf(const Value& v);
  // Parameter leaf; registered once per tape and reused on later calls.
  Value param(const Parameter& p);

  // Gradient of a scalar `loss` with respect to every recorded node.
  Gradients backward(const Value& loss) const;

  const std::shared_ptr<detail::TapeImpl>& impl() const { return impl_; }

 private:
  explicit Tape(bool recording);
  std::shared_ptr<detail::TapeImpl> impl_;
};

// Used by op implementations to attach results to the tape of their inputs.
struct OpRecorder {
  static Value record(Value out, std::string_view kind, std::initializer_list<const Value*> inputs,
                      BackwardFn fn);
  static Value record(Value out, std::string_view kind, const std::vector<const Value*>& inputs,
                      BackwardFn fn);
  static Value make(Shape shape, std::vector<double> data);
  static Value view(Shape shape, BufferPtr buf);
};

}  // namespace cgsn::num
