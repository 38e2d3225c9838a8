// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgsn/pipeline/dataset.hpp"
#include "cgsn/pipeline/select.hpp"

namespace cgsn::eval {

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Set precision/recall/F1. Both empty scores 1; exactly one empty scores 0.
PrecisionRecall evidence_f1(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& gold);

// Lowercased whitespace tokens.
std::vector<std::string> ngram_tokens(const std::string& text);

// Distinct n-grams over all paragraphs divided by the total n-gram count. Absent when no
// paragraph has n tokens.
std::optional<double> rep_inter(const std::vector<std::string>& paragraphs, std::size_t n);

struct InstanceMetrics {
  std::string id;
  PrecisionRecall evidence;
  std::optional<double> rep_inter[3];  // n = 1, 2, 3
};

struct MetricReport {
  std::vector<InstanceMetrics> instances;
  double precision = 0;
  double recall = 0;
  double evidence_f1 = 0;
  std::optional<double> rep_inter[3];  // mean over instances where defined
  std::optional<double> rep_inter_mean;
  std::size_t n_instances = 0;

  std::string to_json() const;
};

// Predictions are matched to gold instances by id; a missing prediction is an error.
MetricReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Instance>& gold);

struct ThresholdSweep {
  double best = 0.5;
  std::vector<std::pair<double, double>> f1;  // (τ, mean evidence F1) in grid order
};

// Re-selects from the stored probabilities at each τ of `grid`; the first τ with the
// highest mean F1 wins.
ThresholdSweep tune_threshold(const std::vector<Prediction>& predictions, const std::vector<Instance>& gold,
                              const std::vector<double>& grid = {0.3, 0.4, 0.5, 0.6, 0.7});

}  // namespace cgsn::eval
