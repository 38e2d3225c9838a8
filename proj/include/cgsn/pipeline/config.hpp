// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "cgsn/model/encoder.hpp"

namespace cgsn {

/// Every knob of the model and of training. Defaults follow the reference
/// hyperparameters; encoder sizes are desk-scale.
struct ModelConfig {
  std::size_t segment_paragraphs = 16;  // N_seg
  std::size_t global_sentence_nodes = 64;
  std::size_t global_paragraph_nodes = 32;
  std::size_t global_document_nodes = 4;
  std::size_t local_hops = 4;
  std::size_t global_hops = 1;  // m; zero disables cross-level attention
  std::size_t embed_dim = 32;   // d_w
  std::size_t hidden_dim = 32;  // d_h
  std::size_t heads = 4;
  std::size_t max_len = 64;  // ℓ_max
  std::size_t encoder_layers = 1;
  ParagraphAnchor anchor = ParagraphAnchor::kCls;
  bool use_global_graph = true;
  bool use_memory = true;

  double learning_rate = 1e-5;
  double warmup_proportion = 0.1;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double max_grad_norm = 0.0;  // 0 disables clipping
  std::size_t batch_size = 4;
  std::size_t epochs = 5;

  double threshold = 0.5;  // τ
  std::uint64_t seed = 0;

  // Throws ValidationError naming the offending field.
  void validate() const;
};

// `key = value` per line; '#' starts a comment. Unknown keys and malformed values are rejected.
ModelConfig parse_config(const std::string& text, const std::string& source = "<memory>");
ModelConfig read_config(const std::string& path);
std::string serialize_config(const ModelConfig& config);

}  // namespace cgsn
