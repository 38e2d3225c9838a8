// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Fixed-size global node banks that persist across the segments of one document.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cgsn/model/layers.hpp"
#include "cgsn/model/local_graph.hpp"

namespace cgsn {

/// Sentence, paragraph and document banks.
struct GlobalGraph {
  num::Value sentences;   // [N_sent × d]
  num::Value paragraphs;  // [N_p × d]
  num::Value documents;   // [N_d × d]

  GlobalGraph detach() const;
};

enum class BankLevel { kSentence, kParagraph, kDocument };

/// One direction of a global hop: `target` bank attends over `source` bank.
struct CrossLevelStep {
  BankLevel target;
  BankLevel source;
  nn::MultiHeadAttention attention;
  nn::GatedFusion fusion;
};

struct GlobalGraphConfig {
  std::size_t dim = 32;
  std::size_t heads = 4;
  std::size_t sentence_nodes = 64;
  std::size_t paragraph_nodes = 32;
  std::size_t document_nodes = 4;
  std::size_t hops = 1;
};

// Levels skipped during reception because the local graph had no nodes there.
struct ReceptionTrace {
  std::vector<BankLevel> skipped;
};

class GlobalGraphNetwork {
 public:
  static GlobalGraphNetwork create(num::ParamStore& store, const GlobalGraphConfig& config, num::Rng& rng);

  // Banks at the start of a document: the learned initial embeddings.
  GlobalGraph initial(num::Tape& tape) const;

  // Each bank attends over the local nodes of its level (document bank over the segment
  // node), then fuses through the gated network.
  GlobalGraph compress_receive(num::Tape& tape, const LocalGraph& local, const GlobalGraph& global,
                               ReceptionTrace* trace = nullptr) const;
  // One bidirectional pass over the level cycle with the parameters of hop `index`.
  GlobalGraph hop(num::Tape& tape, const GlobalGraph& global, std::size_t index) const;
  GlobalGraph run_hops(num::Tape& tape, GlobalGraph global, std::size_t count) const;
  // Local paragraph nodes attend over the global paragraph bank; [P × d].
  num::Value enhance_local(num::Tape& tape, const LocalGraph& local, const GlobalGraph& global) const;

  const GlobalGraphConfig& config() const { return config_; }

  const num::Parameter* initial_sentences = nullptr;
  const num::Parameter* initial_paragraphs = nullptr;
  const num::Parameter* initial_documents = nullptr;
  nn::MultiHeadAttention receive_sentences;
  nn::MultiHeadAttention receive_paragraphs;
  nn::MultiHeadAttention receive_documents;
  nn::GatedFusion fuse_sentences;
  nn::GatedFusion fuse_paragraphs;
  nn::GatedFusion fuse_documents;
  std::vector<std::vector<CrossLevelStep>> hops;  // per hop, in application order
  nn::MultiHeadAttention enhance_attention;
  nn::ResidualFusion enhance_fusion;

 private:
  GlobalGraphConfig config_;
};

const num::Value& bank(const GlobalGraph& g, BankLevel level);
num::Value& bank(GlobalGraph& g, BankLevel level);

/// Maps an enhanced paragraph node to one evidence logit.
struct SelectionHead {
  nn::Linear score;

  static SelectionHead create(num::ParamStore& store, std::size_t dim, num::Rng& rng);
  num::Value logits(num::Tape& tape, const num::Value& enhanced) const;  // [P]
};

struct SelectionOutput {
  num::Value logits;  // [P]
  num::Value loss;    // scalar, mean BCE over paragraphs
};

SelectionOutput selection_loss(num::Tape& tape, const SelectionHead& head, const num::Value& enhanced,
                               std::span<const int> labels);

}  // namespace cgsn
