// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgsn/numerics/adam.hpp"
#include "cgsn/pipeline/model.hpp"

namespace cgsn {

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepInfo {
  std::size_t step = 0;  // 1-based optimizer step
  std::size_t epoch = 0;
  std::size_t segment = 0;
  std::size_t live = 0;  // documents still running at this segment
  double loss = 0.0;     // mean over live documents
  double learning_rate = 0.0;
  double grad_norm = 0.0;
};

struct TrainOptions {
  std::size_t max_steps = 0;  // stop after this many optimizer steps; 0 runs every epoch
  std::function<void(const StepInfo&)> on_step;
};

struct TrainReport {
  std::size_t steps = 0;
  std::size_t epochs = 0;
  std::size_t planned_steps = 0;  // schedule length
  std::vector<double> losses;     // per step
  num::AdamState optimizer;
};

// Learning rate at 1-based `step` of `total`: linear warmup over the first
// ⌈proportion·total⌉ steps, then linear decay to zero.
double scheduled_learning_rate(double peak, double warmup_proportion, std::size_t step, std::size_t total);

// Per-document order of every epoch; epoch e shuffles with a generator seeded from (seed, e).
std::vector<std::vector<std::size_t>> epoch_orders(std::size_t instances, std::size_t epochs, std::uint64_t seed);

// Batches of documents advance segment by segment together; every segment-batch is one optimizer
// step on the mean loss of the documents still running. Banks and memory restart per document.
TrainReport train(CgsnModel& model, const std::vector<TokenizedInstance>& data, const TrainOptions& options = {});

}  // namespace cgsn
