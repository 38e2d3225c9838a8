// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/numerics/value.hpp"

#include <atomic>
#include <sstream>
#include <unordered_map>

#include "cgsn/numerics/params.hpp"

namespace cgsn::num {

namespace {

std::atomic<std::size_t> g_live_bytes{0};
std::atomic<std::size_t> g_peak_bytes{0};

void note_alloc(std::size_t bytes) {
  const std::size_t now = g_live_bytes.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  std::size_t peak = g_peak_bytes.load(std::memory_order_relaxed);
  while (now > peak && !g_peak_bytes.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
}

void note_free(std::size_t bytes) { g_live_bytes.fetch_sub(bytes, std::memory_order_relaxed); }

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

std::size_t MemoryMeter::live_bytes() { return g_live_bytes.load(std::memory_order_relaxed); }
std::size_t MemoryMeter::peak_bytes() { return g_peak_bytes.load(std::memory_order_relaxed); }
void MemoryMeter::reset_peak() { g_peak_bytes.store(g_live_bytes.load(std::memory_order_relaxed)); }

namespace detail {

Buffer::Buffer(std::size_t n, double fill) : data(n, fill) { note_alloc(n * sizeof(double)); }

Buffer::Buffer(std::vector<double> d) : data(std::move(d)) { note_alloc(data.size() * sizeof(double)); }

Buffer::~Buffer() { note_free(data.size() * sizeof(double)); }

struct TapeImpl {
  bool recording = true;
  std::vector<std::string_view> kinds;
  std::vector<BackwardFn> backward;
  std::vector<std::size_t> sizes;
  std::unordered_map<const Parameter*, int> param_nodes;

  int push(std::string_view kind, std::size_t size, BackwardFn fn) {
    kinds.push_back(kind);
    backward.push_back(std::move(fn));
    sizes.push_back(size);
    return static_cast<int>(sizes.size()) - 1;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Value

Value::Value() : shape_{0}, buf_(std::make_shared<const detail::Buffer>(0)) {}

Value::Value(Shape shape, std::vector<double> data) : shape_(std::move(shape)) {
  if (numel(shape_) != data.size()) {
    throw DimensionError("value data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_str(shape_));
  }
  for (auto d : shape_) {
    if (d == 0) throw DimensionError("shape extents must be positive: " + shape_str(shape_));
  }
  buf_ = std::make_shared<const detail::Buffer>(std::move(data));
}

Value::Value(Shape shape, BufferPtr buf) : shape_(std::move(shape)), buf_(std::move(buf)) {}

Value Value::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Value Value::full(Shape shape, double v) {
  const std::size_t n = numel(shape);
  return Value(std::move(shape), std::vector<double>(n, v));
}

Value Value::scalar(double v) { return Value({1}, {v}); }

Value Value::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
  return Value({rows, cols}, std::move(data));
}

std::size_t Value::size() const { return buf_->data.size(); }

std::size_t Value::rows() const {
  if (shape_.size() == 1) return 1;
  if (shape_.size() == 2) return shape_[0];
  throw DimensionError("rows() needs rank 1 or 2, got " + shape_str(shape_));
}

std::size_t Value::cols() const {
  if (shape_.size() == 1) return shape_[0];
  if (shape_.size() == 2) return shape_[1];
  throw DimensionError("cols() needs rank 1 or 2, got " + shape_str(shape_));
}

std::span<const double> Value::data() const { return buf_->data; }

double Value::item() const {
  if (size() != 1) throw DimensionError("item() on non-scalar of shape " + shape_str(shape_));
  return buf_->data[0];
}

Value Value::detach() const { return Value(shape_, buf_); }

// ---------------------------------------------------------------------------
// Gradients

std::span<double> GradSink::at(int id) {
  if (id < 0) return {};
  auto& g = grads_[static_cast<std::size_t>(id)];
  if (g.empty()) g.assign(sizes_[static_cast<std::size_t>(id)], 0.0);
  return g;
}

std::vector<double> Gradients::of(const Value& v) const {
  const int id = v.node();
  if (id < 0 || static_cast<std::size_t>(id) >= grads_.size() || grads_[id].empty()) {
    return std::vector<double>(v.size(), 0.0);
  }
  return grads_[id];
}

// ---------------------------------------------------------------------------
// Tape

Tape::Tape() : Tape(true) {}

Tape::Tape(bool recording) : impl_(std::make_shared<detail::TapeImpl>()) {
  impl_->recording = recording;
}

Tape Tape::inference() { return Tape(false); }

bool Tape::recording() const { return impl_->recording; }

std::size_t Tape::node_count() const { return impl_->sizes.size(); }

Value Tape::leaf(const Value& v) {
  Value out = v.detach();
  if (!impl_->recording) return out;
  out.tape_ = impl_;
  out.node_ = impl_->push("leaf", v.size(), {});
  return out;
}

Value Tape::param(const Parameter& p) {
  if (!impl_->recording) return p.value().detach();
  auto it = impl_->param_nodes.find(&p);
  Value out = p.value().detach();
  out.tape_ = impl_;
  if (it != impl_->param_nodes.end()) {
    out.node_ = it->second;
    return out;
  }
  out.node_ = impl_->push("param", p.value().size(), {});
  impl_->param_nodes.emplace(&p, out.node_);
  return out;
}

Gradients Tape::backward(const Value& loss) const {
  if (loss.size() != 1) {
    throw DimensionError("backward needs a scalar loss, got shape " + shape_str(loss.shape()));
  }
  if (loss.node_ < 0 || loss.tape_ != impl_) {
    throw std::invalid_argument("backward: loss is not recorded on this tape");
  }
  const auto n = impl_->sizes.size();
  std::vector<std::vector<double>> grads(n);
  grads[static_cast<std::size_t>(loss.node_)] = {1.0};
  GradSink sink(grads, impl_->sizes);
  for (int i = loss.node_; i >= 0; --i) {
    auto& g = grads[static_cast<std::size_t>(i)];
    const auto& fn = impl_->backward[static_cast<std::size_t>(i)];
    if (g.empty() || !fn) continue;
    fn(g, sink);
  }
  return Gradients(std::move(grads), impl_->sizes);
}

void ParamStore::accumulate(const Tape& tape, const Gradients& grads) {
  for (auto& p : params_) {
    auto it = tape.impl()->param_nodes.find(p.get());
    if (it == tape.impl()->param_nodes.end()) continue;
    Value handle = p->value().detach();
    handle.node_ = it->second;
    const auto g = grads.of(handle);
    if (p->grad.size() != g.size()) p->grad.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) p->grad[i] += g[i];
  }
}

// ---------------------------------------------------------------------------
// OpRecorder

Value OpRecorder::make(Shape shape, std::vector<double> data) {
  return Value(std::move(shape), std::make_shared<const detail::Buffer>(std::move(data)));
}

Value OpRecorder::view(Shape shape, BufferPtr buf) { return Value(std::move(shape), std::move(buf)); }

Value OpRecorder::record(Value out, std::string_view kind, std::initializer_list<const Value*> inputs,
                         BackwardFn fn) {
  return record(std::move(out), kind, std::vector<const Value*>(inputs), std::move(fn));
}

Value OpRecorder::record(Value out, std::string_view kind, const std::vector<const Value*>& inputs,
                         BackwardFn fn) {
  std::shared_ptr<detail::TapeImpl> tape;
  for (const Value* in : inputs) {
    if (in->node_ < 0) continue;
    if (tape && tape != in->tape_) {
      throw std::invalid_argument(std::string(kind) + ": inputs are recorded on different tapes");
    }
    tape = in->tape_;
  }
  if (!tape) return out;
  out.node_ = tape->push(kind, out.size(), std::move(fn));
  out.tape_ = std::move(tape);
  return out;
}

}  // namespace cgsn::num
