// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/numerics/params.hpp"

#include <cmath>
#include <stdexcept>

namespace cgsn::num {

Parameter::Parameter(std::string name, Value value) : name_(std::move(name)), value_(std::move(value)) {}

void Parameter::assign(std::vector<double> data) {
  if (data.size() != value_.size()) {
    throw DimensionError("parameter " + name_ + ": assigning " + std::to_string(data.size()) +
                         " values to shape " + shape_str(value_.shape()));
  }
  value_ = Value(value_.shape(), std::move(data));
}

void Parameter::zero_grad() { grad.assign(value_.size(), 0.0); }

Parameter& ParamStore::create(const std::string& name, Shape shape, Init init, Rng& rng) {
  const std::size_t n = numel(shape);
  std::vector<double> data(n, 0.0);
  switch (init) {
    case Init::kZeros:
      break;
    case Init::kXavier: {
      const std::size_t fan_in = shape.size() >= 2 ? shape[shape.size() - 2] : 1;
      const std::size_t fan_out = shape.back();
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (auto& x : data) x = dist(rng);
      break;
    }
    case Init::kNormalSmall: {
      std::normal_distribution<double> dist(0.0, 0.5);
      for (auto& x : data) x = dist(rng);
      break;
    }
  }
  return add(name, Value(std::move(shape), std::move(data)));
}

Parameter& ParamStore::add(const std::string& name, Value value) {
  if (find(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  params_.push_back(std::make_unique<Parameter>(name, std::move(value)));
  return *params_.back();
}

Parameter* ParamStore::find(const std::string& name) {
  for (auto& p : params_)
    if (p->name() == name) return p.get();
  return nullptr;
}

const Parameter* ParamStore::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name() == name) return p.get();
  return nullptr;
}

Parameter& ParamStore::get(const std::string& name) {
  if (auto* p = find(name)) return *p;
  throw std::out_of_range("unknown parameter: " + name);
}

std::vector<Parameter*> ParamStore::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParamStore::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParamStore::element_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value().size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

double ParamStore::grad_norm() const {
  double s = 0.0;
  for (const auto& p : params_)
    for (double g : p->grad) s += g * g;
  return std::sqrt(s);
}

void ParamStore::scale_grads(double factor) {
  for (auto& p : params_)
    for (auto& g : p->grad) g *= factor;
}

}  // namespace cgsn::num
