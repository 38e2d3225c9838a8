// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cgsn/numerics/value.hpp"

namespace cgsn::num {

using Rng = std::mt19937_64;

/// A named trainable array with an accumulated gradient buffer.
class Parameter {
 public:
  Parameter(std::string name, Value value);

  const std::string& name() const { return name_; }
  const Value& value() const { return value_; }
  const Shape& shape() const { return value_.shape(); }
  // Replaces the data; shape must be unchanged.
  void assign(std::vector<double> data);

  std::vector<double> grad;
  void zero_grad();

 private:
  std::string name_;
  Value value_;
};

enum class Init { kZeros, kXavier, kNormalSmall };

/// Owns every parameter of a model in creation order (the checkpoint order).
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  Parameter& create(const std::string& name, Shape shape, Init init, Rng& rng);
  Parameter& add(const std::string& name, Value value);

  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;
  Parameter& get(const std::string& name);

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::size_t size() const { return params_.size(); }
  std::size_t element_count() const;

  void zero_grad();
  // Adds gradients of every parameter registered on `tape`.
  void accumulate(const Tape& tape, const Gradients& grads);
  // Global L2 norm of accumulated gradients.
  double grad_norm() const;
  void scale_grads(double factor);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

}  // namespace cgsn::num
