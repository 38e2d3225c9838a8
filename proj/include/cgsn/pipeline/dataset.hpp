// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Documents, question instances and the line-per-record dataset format.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgsn/model/encoder.hpp"

namespace cgsn {

// Raised for malformed inputs: bad records, bad configs, bad CLI arguments.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Document {
  std::string id;
  std::vector<std::vector<std::string>> paragraphs;  // sentences of each paragraph

  std::size_t paragraph_count() const { return paragraphs.size(); }
  std::string paragraph_text(std::size_t index) const;
};

struct Instance {
  std::string id;
  std::string question;
  Document document;
  std::vector<std::size_t> evidence;  // paragraph indices, sorted and unique
  std::string answer;                 // carried along, never consumed
};

struct DatasetStats {
  std::size_t dropped_paragraphs = 0;  // paragraphs that tokenized to nothing
  std::size_t dropped_evidence = 0;    // evidence entries pointing at dropped paragraphs
};

// One JSON object per line: {"id", "question", "paragraphs": [[sentence...]...], "evidence", "answer"}.
std::vector<Instance> parse_dataset(const std::string& text, const std::string& source = "<memory>",
                                    DatasetStats* stats = nullptr);
std::vector<Instance> read_dataset(const std::string& path, DatasetStats* stats = nullptr);
std::string serialize_dataset(const std::vector<Instance>& instances);
void write_dataset(const std::string& path, const std::vector<Instance>& instances);

/// An instance mapped to token ids.
struct TokenizedInstance {
  std::string id;
  std::vector<int> question;
  std::vector<TokenizedParagraph> paragraphs;
  std::vector<int> labels;  // 1 for evidence paragraphs
};

TokenizedInstance tokenize_instance(const Instance& instance, const Vocabulary& vocab);
std::vector<TokenizedInstance> tokenize_dataset(const std::vector<Instance>& instances, const Vocabulary& vocab);
// Vocabulary over questions and paragraph text, in order of first appearance.
Vocabulary build_dataset_vocab(const std::vector<Instance>& instances);

}  // namespace cgsn
