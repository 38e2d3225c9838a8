// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/pipeline/model.hpp"

#include <stdexcept>

namespace cgsn {

std::vector<std::pair<std::size_t, std::size_t>> segment_document(std::size_t paragraphs,
                                                                   std::size_t per_segment) {
  if (per_segment == 0) throw std::invalid_argument("segment_document: segment size must be positive");
  if (paragraphs == 0) throw std::invalid_argument("segment_document: empty document");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < paragraphs; b += per_segment) out.emplace_back(b, std::min(paragraphs, b + per_segment));
  return out;
}

CgsnModel CgsnModel::create(const ModelConfig& config, std::size_t vocab_size) {
  config.validate();
  num::Rng rng(config.seed);
  CgsnModel m;
  m.config_ = config;
  m.vocab_size_ = vocab_size;

  EncoderConfig enc;
  enc.vocab_size = vocab_size;
  enc.embed_dim = config.embed_dim;
  enc.hidden_dim = config.hidden_dim;
  enc.heads = config.heads;
  enc.max_len = config.max_len;
  enc.layers = config.encoder_layers;
  enc.anchor = config.anchor;
  m.encoder = ToyEncoder::create(m.store, enc, rng);
  m.local = LocalGraphNetwork::create(m.store, {config.hidden_dim, config.heads, config.local_hops}, rng);
  if (config.use_global_graph) {
    GlobalGraphConfig g;
    g.dim = config.hidden_dim;
    g.heads = config.heads;
    g.sentence_nodes = config.global_sentence_nodes;
    g.paragraph_nodes = config.global_paragraph_nodes;
    g.document_nodes = config.global_document_nodes;
    g.hops = config.global_hops;
    m.global = GlobalGraphNetwork::create(m.store, g, rng);
    if (config.use_memory) m.memory = EvidenceMemoryNetwork::create(m.store, config.hidden_dim, rng);
  }
  m.head = SelectionHead::create(m.store, config.hidden_dim, rng);
  return m;
}

SegmentResult forward_encoded(num::Tape& tape, const CgsnModel& model, const SegmentEncoding& encoding,
                              std::span<const int> labels, DocumentState& state) {
  const ModelConfig& cfg = model.config();
  SegmentResult out;

  std::optional<GlobalGraph> banks;
  if (model.global) {
    banks = state.banks ? *state.banks : model.global->initial(tape);
    if (model.memory && state.segment > 0) {
      if (!state.summary) throw std::logic_error("memory write without a cached summary");
      banks = model.memory->write(tape, *banks, *state.summary);
    }
  }

  LocalGraph g = init_local_graph(encoding);
  g = model.local.interact(tape, g);
  g = model.local.run_hops(tape, std::move(g), cfg.local_hops);

  num::Value enhanced = g.paragraphs;
  if (model.global) {
    banks = model.global->compress_receive(tape, g, *banks, &out.trace);
    banks = model.global->run_hops(tape, std::move(*banks), cfg.global_hops);
    enhanced = model.global->enhance_local(tape, g, *banks);
  }

  if (labels.empty()) {
    out.logits = model.head.logits(tape, enhanced);
  } else {
    auto sel = selection_loss(tape, model.head, enhanced, labels);
    out.logits = std::move(sel.logits);
    out.loss = std::move(sel.loss);
  }

  if (banks) state.banks = banks->detach();
  if (model.memory) state.summary = summarize(out.logits, enhanced);
  ++state.segment;
  return out;
}

SegmentResult forward_segment(num::Tape& tape, const CgsnModel& model, std::span<const int> question,
                              std::span<const TokenizedParagraph> paragraphs, std::span<const int> labels,
                              DocumentState& state) {
  return forward_encoded(tape, model, model.encoder.encode(tape, question, paragraphs), labels, state);
}

DocumentOutput forward_document(const CgsnModel& model, const TokenizedInstance& instance) {
  DocumentOutput out;
  DocumentState state;
  const auto segments = segment_document(instance.paragraphs.size(), model.config().segment_paragraphs);
  const std::span<const TokenizedParagraph> all(instance.paragraphs);
  for (const auto& [begin, end] : segments) {
    const std::size_t entry = num::MemoryMeter::live_bytes();
    num::MemoryMeter::reset_peak();
    {
      num::Tape tape = num::Tape::inference();
      const SegmentResult r = forward_segment(tape, model, instance.question, all.subspan(begin, end - begin), {}, state);
      out.logits.insert(out.logits.end(), r.logits.data().begin(), r.logits.data().end());
    }
    out.segment_peak_bytes.push_back(num::MemoryMeter::peak_bytes() - entry);
  }
  return out;
}

}  // namespace cgsn
