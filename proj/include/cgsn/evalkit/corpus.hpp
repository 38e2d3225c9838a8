// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cgsn/pipeline/dataset.hpp"

namespace cgsn::eval {

struct QasperStats {
  std::size_t papers = 0;
  std::size_t questions = 0;
  std::size_t matched_evidence = 0;
  std::size_t unmatched_evidence = 0;  // evidence strings equal to no paragraph
};

// Public Qasper JSON (papers keyed by id). Paragraphs of all sections are flattened in
// order; each question becomes one instance using the first annotator's answer.
std::vector<Instance> parse_qasper(const std::string& text, const std::string& source = "<memory>",
                                   QasperStats* stats = nullptr);
std::vector<Instance> ingest_qasper(const std::string& path, QasperStats* stats = nullptr);

// Top-k paragraphs by the number of distinct question tokens they contain, lower index
// first on ties; returned in increasing order.
std::vector<std::size_t> lexical_baseline(const Instance& instance, std::size_t k);

}  // namespace cgsn::eval
