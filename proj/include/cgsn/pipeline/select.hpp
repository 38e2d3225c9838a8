// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cgsn/pipeline/model.hpp"

namespace cgsn {

// {j : p_j > τ}; when nothing clears τ, the single most probable paragraph (lowest index on ties).
std::vector<std::size_t> select_from_probabilities(const std::vector<double>& probabilities, double threshold);

struct Prediction {
  std::string id;
  std::vector<std::size_t> indices;
  std::vector<double> probabilities;
};

Prediction select_evidence(const CgsnModel& model, const TokenizedInstance& instance, double threshold);

// One JSON array per line: ["id", [indices...], [probabilities...]].
std::string serialize_predictions(const std::vector<Prediction>& predictions);
std::vector<Prediction> parse_predictions(const std::string& text, const std::string& source = "<memory>");
void write_predictions(const std::string& path, const std::vector<Prediction>& predictions);
std::vector<Prediction> read_predictions(const std::string& path);

}  // namespace cgsn
