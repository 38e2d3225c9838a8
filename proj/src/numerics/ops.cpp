// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cgsn::num {

namespace {

using detail::Buffer;

struct Dims {
  std::size_t rows;
  std::size_t cols;
};

Dims dims2(const Value& v, const char* op) {
  if (v.rank() == 1) return {1, v.shape()[0]};
  if (v.rank() == 2) return {v.shape()[0], v.shape()[1]};
  throw DimensionError(std::string(op) + ": expected rank 1 or 2, got " + shape_str(v.shape()));
}

void require_same(const Value& a, const Value& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

const double* raw(const BufferPtr& b) { return b->data.data(); }

template <class F>
Value unary(const Value& a, F&& f) {
  std::vector<double> out(a.size());
  const double* x = a.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
  return OpRecorder::make(a.shape(), std::move(out));
}

}  // namespace

Value matmul(const Value& a, const Value& b) {
  const auto [m, k] = dims2(a, "matmul");
  const auto [k2, n] = dims2(b, "matmul");
  if (k != k2) {
    throw DimensionError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " · " +
                         shape_str(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  auto ba = a.buffer();
  auto bb = b.buffer();
  const int ia = a.node();
  const int ib = b.node();
  return OpRecorder::record(
      OpRecorder::make({m, n}, std::move(out)), "matmul", {&a, &b},
      [=](std::span<const double> g, GradSink& sink) {
        if (auto ga = sink.at(ia); !ga.empty()) {
          // dA = G · Bᵀ
          const double* pb = raw(bb);
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              double s = 0.0;
              const double* brow = pb + p * n;
              const double* grow = g.data() + i * n;
              for (std::size_t j = 0; j < n; ++j) s += grow[j] * brow[j];
              ga[i * k + p] += s;
            }
          }
        }
        if (auto gb = sink.at(ib); !gb.empty()) {
          // dB = Aᵀ · G
          const double* pa = raw(ba);
          for (std::size_t i = 0; i < m; ++i) {
            const double* grow = g.data() + i * n;
            for (std::size_t p = 0; p < k; ++p) {
              const double av = pa[i * k + p];
              if (av == 0.0) continue;
              double* gbrow = gb.data() + p * n;
              for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
            }
          }
        }
      });
}

Value transpose(const Value& a) {
  const auto [m, n] = dims2(a, "transpose");
  std::vector<double> out(m * n);
  const double* x = a.data().data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = x[i * n + j];
  const int ia = a.node();
  return OpRecorder::record(OpRecorder::make({n, m}, std::move(out)), "transpose", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < m; ++i)
                                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j * m + i];
                            });
}

Value add(const Value& a, const Value& b) {
  require_same(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  const int ia = a.node();
  const int ib = b.node();
  return OpRecorder::record(OpRecorder::make(a.shape(), std::move(out)), "add", {&a, &b},
                            [=](std::span<const double> g, GradSink& sink) {
                              for (int id : {ia, ib}) {
                                auto gx = sink.at(id);
                                for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
                              }
                            });
}

Value sub(const Value& a, const Value& b) {
  require_same(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  const int ia = a.node();
  const int ib = b.node();
  return OpRecorder::record(OpRecorder::make(a.shape(), std::move(out)), "sub", {&a, &b},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
                              auto gb = sink.at(ib);
                              for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
                            });
}

Value mul(const Value& a, const Value& b) {
  require_same(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  auto ba = a.buffer();
  auto bb = b.buffer();
  const int ia = a.node();
  const int ib = b.node();
  return OpRecorder::record(OpRecorder::make(a.shape(), std::move(out)), "mul", {&a, &b},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * bb->data[i];
                              auto gb = sink.at(ib);
                              for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * ba->data[i];
                            });
}

Value scale(const Value& a, double factor) {
  Value out = unary(a, [factor](double x) { return x * factor; });
  const int ia = a.node();
  return OpRecorder::record(std::move(out), "scale", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * factor;
                            });
}

Value add_row(const Value& a, const Value& bias) {
  const auto [m, n] = dims2(a, "add_row");
  if (bias.size() != n) {
    throw DimensionError("add_row: bias " + shape_str(bias.shape()) + " does not match " +
                         shape_str(a.shape()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = a[i * n + j] + bias[j];
  const int ia = a.node();
  const int ib = bias.node();
  return OpRecorder::record(OpRecorder::make(a.shape(), std::move(out)), "add_row", {&a, &bias},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
                              auto gb = sink.at(ib);
                              if (!gb.empty())
                                for (std::size_t i = 0; i < m; ++i)
                                  for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
                            });
}

Value scale_rows(const Value& a, const Value& gate) {
  const auto [m, n] = dims2(a, "scale_rows");
  if (gate.size() != m) {
    throw DimensionError("scale_rows: gate " + shape_str(gate.shape()) + " does not match rows of " +
                         shape_str(a.shape()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = a[i * n + j] * gate[i];
  auto ba = a.buffer();
  auto bg = gate.buffer();
  const int ia = a.node();
  const int ig = gate.node();
  return OpRecorder::record(OpRecorder::make(a.shape(), std::move(out)), "scale_rows", {&a, &gate},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              if (!ga.empty())
                                for (std::size_t i = 0; i < m; ++i)
                                  for (std::size_t j = 0; j < n; ++j)
                                    ga[i * n + j] += g[i * n + j] * bg->data[i];
                              auto gg = sink.at(ig);
                              if (!gg.empty())
                                for (std::size_t i = 0; i < m; ++i)
                                  for (std::size_t j = 0; j < n; ++j)
                                    gg[i] += g[i * n + j] * ba->data[i * n + j];
                            });
}

Value lerp_rows(const Value& a, const Value& b, const Value& gamma) {
  require_same(a, b, "lerp_rows");
  const auto [m, n] = dims2(a, "lerp_rows");
  if (gamma.size() != m) {
    throw DimensionError("lerp_rows: gate " + shape_str(gamma.shape()) + " does not match rows of " +
                         shape_str(a.shape()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < m; ++i) {
    const double y = gamma[i];
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = (1.0 - y) * a[i * n + j] + y * b[i * n + j];
  }
  auto ba = a.buffer();
  auto bb = b.buffer();
  auto bg = gamma.buffer();
  const int ia = a.node();
  const int ib = b.node();
  const int ig = gamma.node();
  return OpRecorder::record(
      OpRecorder::make(a.shape(), std::move(out)), "lerp_rows", {&a, &b, &gamma},
      [=](std::span<const double> g, GradSink& sink) {
        auto ga = sink.at(ia);
        auto gb = sink.at(ib);
        auto gg = sink.at(ig);
        for (std::size_t i = 0; i < m; ++i) {
          const double y = bg->data[i];
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = i * n + j;
            if (!ga.empty()) ga[k] += (1.0 - y) * g[k];
            if (!gb.empty()) gb[k] += y * g[k];
            acc += g[k] * (bb->data[k] - ba->data[k]);
          }
          if (!gg.empty()) gg[i] += acc;
        }
      });
}

Value tanh(const Value& a) {
  Value out = unary(a, [](double x) { return std::tanh(x); });
  auto bo = out.buffer();
  const int ia = a.node();
  return OpRecorder::record(std::move(out), "tanh", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < ga.size(); ++i) {
                                const double y = bo->data[i];
                                ga[i] += g[i] * (1.0 - y * y);
                              }
                            });
}

Value sigmoid(const Value& a) {
  Value out = unary(a, [](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  auto bo = out.buffer();
  const int ia = a.node();
  return OpRecorder::record(std::move(out), "sigmoid", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < ga.size(); ++i) {
                                const double y = bo->data[i];
                                ga[i] += g[i] * y * (1.0 - y);
                              }
                            });
}

namespace {

// Softmax over `count` entries spaced `stride` apart, skipping masked entries.
void softmax_strided(const double* x, double* y, std::size_t count, std::size_t stride,
                     const std::uint8_t* mask) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i)
    if (!mask || mask[i]) mx = std::max(mx, x[i * stride]);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double e = (!mask || mask[i]) ? std::exp(x[i * stride] - mx) : 0.0;
    y[i * stride] = e;
    total += e;
  }
  for (std::size_t i = 0; i < count; ++i) y[i * stride] /= total;
}

void softmax_backward_strided(const double* y, const double* g, double* gx, std::size_t count,
                              std::size_t stride) {
  double dot = 0.0;
  for (std::size_t i = 0; i < count; ++i) dot += g[i * stride] * y[i * stride];
  for (std::size_t i = 0; i < count; ++i) gx[i * stride] += y[i * stride] * (g[i * stride] - dot);
}

Value softmax_impl(const Value& v, int axis, const std::uint8_t* mask, std::string_view kind) {
  if (v.size() == 0) throw DimensionError("softmax over an empty axis");
  Dims d{1, v.size()};
  if (v.rank() == 2) {
    d = {v.shape()[0], v.shape()[1]};
  } else if (v.rank() != 1) {
    throw DimensionError("softmax: expected rank 1 or 2, got " + shape_str(v.shape()));
  }
  if (v.rank() == 1 && axis != 0 && axis != -1) {
    throw DimensionError("softmax: axis " + std::to_string(axis) + " out of range for rank 1");
  }
  const bool over_rows = v.rank() == 2 && axis == 0;
  if (v.rank() == 2 && axis != 0 && axis != 1 && axis != -1) {
    throw DimensionError("softmax: axis " + std::to_string(axis) + " out of range for rank 2");
  }
  const std::size_t lines = over_rows ? d.cols : d.rows;
  const std::size_t count = over_rows ? d.rows : d.cols;
  const std::size_t stride = over_rows ? d.cols : 1;
  const std::size_t step = over_rows ? 1 : d.cols;
  std::vector<double> out(v.size());
  const double* x = v.data().data();
  for (std::size_t l = 0; l < lines; ++l) {
    if (mask) {
      bool any = false;
      for (std::size_t i = 0; i < count; ++i) any = any || mask[l * step + i];
      if (!any) throw DimensionError("masked softmax: row " + std::to_string(l) + " has no entries");
    }
    softmax_strided(x + l * step, out.data() + l * step, count, stride, mask ? mask + l * step : nullptr);
  }
  Value res = OpRecorder::make(v.shape(), std::move(out));
  auto by = res.buffer();
  const int iv = v.node();
  return OpRecorder::record(std::move(res), kind, {&v},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto gx = sink.at(iv);
                              for (std::size_t l = 0; l < lines; ++l)
                                softmax_backward_strided(raw(by) + l * step, g.data() + l * step,
                                                         gx.data() + l * step, count, stride);
                            });
}

}  // namespace

Value softmax(const Value& v, int axis) { return softmax_impl(v, axis, nullptr, "softmax"); }

Value masked_softmax_rows(const Value& scores, std::span<const std::uint8_t> mask) {
  if (mask.size() != scores.size()) {
    throw DimensionError("masked_softmax_rows: mask length " + std::to_string(mask.size()) +
                         " does not match " + shape_str(scores.shape()));
  }
  return softmax_impl(scores, -1, mask.data(), "masked_softmax");
}

Value concat_cols(const std::vector<Value>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t m = dims2(parts[0], "concat_cols").rows;
  std::vector<std::size_t> widths;
  std::size_t n = 0;
  for (const auto& p : parts) {
    const auto d = dims2(p, "concat_cols");
    if (d.rows != m) {
      throw DimensionError("concat_cols: row mismatch " + shape_str(parts[0].shape()) + " vs " +
                           shape_str(p.shape()));
    }
    widths.push_back(d.cols);
    n += d.cols;
  }
  std::vector<double> out(m * n);
  std::size_t off = 0;
  std::vector<int> ids;
  std::vector<const Value*> ins;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const double* x = parts[k].data().data();
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(x + i * widths[k], widths[k], out.data() + i * n + off);
    off += widths[k];
    ids.push_back(parts[k].node());
    ins.push_back(&parts[k]);
  }
  return OpRecorder::record(OpRecorder::make({m, n}, std::move(out)), "concat_cols", ins,
                            [=](std::span<const double> g, GradSink& sink) {
                              std::size_t off = 0;
                              for (std::size_t k = 0; k < ids.size(); ++k) {
                                auto gx = sink.at(ids[k]);
                                if (!gx.empty())
                                  for (std::size_t i = 0; i < m; ++i)
                                    for (std::size_t j = 0; j < widths[k]; ++j)
                                      gx[i * widths[k] + j] += g[i * n + off + j];
                                off += widths[k];
                              }
                            });
}

Value concat_rows(const std::vector<Value>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t n = dims2(parts[0], "concat_rows").cols;
  std::size_t m = 0;
  std::vector<int> ids;
  std::vector<std::size_t> sizes;
  std::vector<const Value*> ins;
  for (const auto& p : parts) {
    const auto d = dims2(p, "concat_rows");
    if (d.cols != n) {
      throw DimensionError("concat_rows: column mismatch " + shape_str(parts[0].shape()) + " vs " +
                           shape_str(p.shape()));
    }
    m += d.rows;
    ids.push_back(p.node());
    sizes.push_back(p.size());
    ins.push_back(&p);
  }
  std::vector<double> out;
  out.reserve(m * n);
  for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  return OpRecorder::record(OpRecorder::make({m, n}, std::move(out)), "concat_rows", ins,
                            [=](std::span<const double> g, GradSink& sink) {
                              std::size_t off = 0;
                              for (std::size_t k = 0; k < ids.size(); ++k) {
                                auto gx = sink.at(ids[k]);
                                for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[off + i];
                                off += sizes[k];
                              }
                            });
}

Value slice_cols(const Value& a, std::size_t begin, std::size_t end) {
  const auto [m, n] = dims2(a, "slice_cols");
  if (begin >= end || end > n) {
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") out of bounds for " + shape_str(a.shape()));
  }
  const std::size_t w = end - begin;
  std::vector<double> out(m * w);
  const double* x = a.data().data();
  for (std::size_t i = 0; i < m; ++i) std::copy_n(x + i * n + begin, w, out.data() + i * w);
  const int ia = a.node();
  return OpRecorder::record(OpRecorder::make({m, w}, std::move(out)), "slice_cols", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < m; ++i)
                                for (std::size_t j = 0; j < w; ++j) ga[i * n + begin + j] += g[i * w + j];
                            });
}

Value slice_rows(const Value& a, std::size_t begin, std::size_t end) {
  const auto [m, n] = dims2(a, "slice_rows");
  if (begin >= end || end > m) {
    throw DimensionError("slice_rows: range [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") out of bounds for " + shape_str(a.shape()));
  }
  std::vector<double> out(a.data().begin() + begin * n, a.data().begin() + end * n);
  const int ia = a.node();
  return OpRecorder::record(OpRecorder::make({end - begin, n}, std::move(out)), "slice_rows", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < g.size(); ++i) ga[begin * n + i] += g[i];
                            });
}

Value gather_rows(const Value& a, std::span<const std::size_t> rows) {
  const auto [m, n] = dims2(a, "gather_rows");
  if (rows.empty()) throw DimensionError("gather_rows: empty index list");
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  std::vector<double> out(idx.size() * n);
  const double* x = a.data().data();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= m) {
      throw DimensionError("gather_rows: index " + std::to_string(idx[r]) + " out of bounds for " +
                           shape_str(a.shape()));
    }
    std::copy_n(x + idx[r] * n, n, out.data() + r * n);
  }
  const int ia = a.node();
  return OpRecorder::record(OpRecorder::make({idx.size(), n}, std::move(out)), "gather_rows", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t r = 0; r < idx.size(); ++r)
                                for (std::size_t j = 0; j < n; ++j) ga[idx[r] * n + j] += g[r * n + j];
                            });
}

Value reshape(const Value& a, Shape shape) {
  if (numel(shape) != a.size()) {
    throw DimensionError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  }
  const int ia = a.node();
  return OpRecorder::record(OpRecorder::view(std::move(shape), a.buffer()), "reshape", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
                            });
}

Value mean_rows(const Value& a) {
  const auto [m, n] = dims2(a, "mean_rows");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += a[i * n + j];
  for (auto& x : out) x /= static_cast<double>(m);
  const int ia = a.node();
  return OpRecorder::record(OpRecorder::make({1, n}, std::move(out)), "mean_rows", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              const double inv = 1.0 / static_cast<double>(m);
                              for (std::size_t i = 0; i < m; ++i)
                                for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j] * inv;
                            });
}

Value sum(const Value& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  const int ia = a.node();
  return OpRecorder::record(OpRecorder::make({1}, {s}), "sum", {&a},
                            [=](std::span<const double> g, GradSink& sink) {
                              auto ga = sink.at(ia);
                              for (auto& x : ga) x += g[0];
                            });
}

Value bce_with_logits(const Value& logits, std::span<const int> labels) {
  const std::size_t p = logits.size();
  if (labels.size() != p) {
    throw DimensionError("bce_with_logits: " + std::to_string(labels.size()) + " labels for " +
                         shape_str(logits.shape()) + " logits");
  }
  std::vector<int> y(labels.begin(), labels.end());
  for (int b : y) {
    if (b != 0 && b != 1) throw std::invalid_argument("bce_with_logits: label " + std::to_string(b) + " outside {0,1}");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double x = logits[i];
    // softplus(x) − b·x == −[b log σ(x) + (1−b) log(1−σ(x))]
    total += std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))) - y[i] * x;
  }
  auto bl = logits.buffer();
  const int il = logits.node();
  return OpRecorder::record(OpRecorder::make({1}, {total / static_cast<double>(p)}), "bce_with_logits",
                            {&logits}, [=](std::span<const double> g, GradSink& sink) {
                              auto gl = sink.at(il);
                              const double inv = g[0] / static_cast<double>(p);
                              for (std::size_t i = 0; i < p; ++i) {
                                const double x = bl->data[i];
                                const double s = x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                                                        : std::exp(x) / (1.0 + std::exp(x));
                                gl[i] += (s - y[i]) * inv;
                              }
                            });
}

}  // namespace cgsn::num
