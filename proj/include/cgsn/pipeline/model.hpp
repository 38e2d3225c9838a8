// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// The full selector: encoder, local graph, global banks, evidence memory and the
// selection head, driven one segment at a time.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cgsn/model/evidence_memory.hpp"
#include "cgsn/model/global_graph.hpp"
#include "cgsn/model/local_graph.hpp"
#include "cgsn/pipeline/config.hpp"
#include "cgsn/pipeline/dataset.hpp"

namespace cgsn {

// [begin, end) paragraph ranges of consecutive runs of at most `per_segment` paragraphs.
std::vector<std::pair<std::size_t, std::size_t>> segment_document(std::size_t paragraphs, std::size_t per_segment);

class CgsnModel {
 public:
  // Parameters are created in a fixed order from `config.seed`.
  static CgsnModel create(const ModelConfig& config, std::size_t vocab_size);

  const ModelConfig& config() const { return config_; }
  std::size_t vocab_size() const { return vocab_size_; }

  num::ParamStore store;
  ToyEncoder encoder;
  LocalGraphNetwork local;
  std::optional<GlobalGraphNetwork> global;      // absent in the w/o-global-graph ablation
  std::optional<EvidenceMemoryNetwork> memory;   // absent without the global graph or with memory off
  SelectionHead head;

 private:
  ModelConfig config_;
  std::size_t vocab_size_ = 0;
};

/// What one document carries from one segment to the next. Everything here is detached.
struct DocumentState {
  std::size_t segment = 0;            // index of the next segment
  std::optional<GlobalGraph> banks;   // unset before the first segment
  std::optional<num::Value> summary;  // cached weighted paragraph summary
};

struct SegmentResult {
  num::Value logits;  // [P]
  num::Value loss;    // unset when no labels were given
  ReceptionTrace trace;
};

// Everything after the encoder: memory write, local graph, global graph, selection.
// Any SegmentEncoder output is accepted.
SegmentResult forward_encoded(num::Tape& tape, const CgsnModel& model, const SegmentEncoding& encoding,
                              std::span<const int> labels, DocumentState& state);

// Runs one segment through the model's own encoder and advances `state`. With `labels` (one per paragraph of the segment) the
// selection loss is attached.
SegmentResult forward_segment(num::Tape& tape, const CgsnModel& model, std::span<const int> question,
                              std::span<const TokenizedParagraph> paragraphs, std::span<const int> labels,
                              DocumentState& state);

struct DocumentOutput {
  std::vector<double> logits;                    // one per paragraph of the document
  std::vector<std::size_t> segment_peak_bytes;   // peak live tensor bytes above the entry level, per segment
};

// Inference over the whole document; state starts fresh.
DocumentOutput forward_document(const CgsnModel& model, const TokenizedInstance& instance);

}  // namespace cgsn
