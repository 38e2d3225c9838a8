// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/model/global_graph.hpp"

#include <stdexcept>

namespace cgsn {

using num::Value;

GlobalGraph GlobalGraph::detach() const {
  return GlobalGraph{sentences.detach(), paragraphs.detach(), documents.detach()};
}

const Value& bank(const GlobalGraph& g, BankLevel level) {
  switch (level) {
    case BankLevel::kSentence:
      return g.sentences;
    case BankLevel::kParagraph:
      return g.paragraphs;
    case BankLevel::kDocument:
      break;
  }
  return g.documents;
}

Value& bank(GlobalGraph& g, BankLevel level) {
  return const_cast<Value&>(bank(static_cast<const GlobalGraph&>(g), level));
}

namespace {

const char* level_name(BankLevel l) {
  switch (l) {
    case BankLevel::kSentence:
      return "sentence";
    case BankLevel::kParagraph:
      return "paragraph";
    case BankLevel::kDocument:
      break;
  }
  return "document";
}

}  // namespace

GlobalGraphNetwork GlobalGraphNetwork::create(num::ParamStore& store, const GlobalGraphConfig& config,
                                              num::Rng& rng) {
  if (config.sentence_nodes == 0 || config.paragraph_nodes == 0 || config.document_nodes == 0) {
    throw std::invalid_argument("global graph bank sizes must be positive");
  }
  GlobalGraphNetwork n;
  n.config_ = config;
  const std::size_t d = config.dim;
  n.initial_sentences = &store.create("global.bank.sentence", {config.sentence_nodes, d}, num::Init::kNormalSmall, rng);
  n.initial_paragraphs = &store.create("global.bank.paragraph", {config.paragraph_nodes, d}, num::Init::kNormalSmall, rng);
  n.initial_documents = &store.create("global.bank.document", {config.document_nodes, d}, num::Init::kNormalSmall, rng);
  n.receive_sentences = nn::MultiHeadAttention::create(store, "global.receive.sentence", d, config.heads, rng);
  n.receive_paragraphs = nn::MultiHeadAttention::create(store, "global.receive.paragraph", d, config.heads, rng);
  n.receive_documents = nn::MultiHeadAttention::create(store, "global.receive.document", d, config.heads, rng);
  n.fuse_sentences = nn::GatedFusion::create(store, "global.receive.sentence.fuse", d, rng);
  n.fuse_paragraphs = nn::GatedFusion::create(store, "global.receive.paragraph.fuse", d, rng);
  n.fuse_documents = nn::GatedFusion::create(store, "global.receive.document.fuse", d, rng);

  // sentence–paragraph, paragraph–document, document–sentence; each pair both ways.
  const std::pair<BankLevel, BankLevel> order[] = {
      {BankLevel::kParagraph, BankLevel::kSentence}, {BankLevel::kSentence, BankLevel::kParagraph},
      {BankLevel::kDocument, BankLevel::kParagraph}, {BankLevel::kParagraph, BankLevel::kDocument},
      {BankLevel::kSentence, BankLevel::kDocument},  {BankLevel::kDocument, BankLevel::kSentence},
  };
  for (std::size_t h = 0; h < config.hops; ++h) {
    std::vector<CrossLevelStep> steps;
    for (const auto& [target, source] : order) {
      const std::string name = "global.hop" + std::to_string(h) + "." + level_name(target) + "_from_" +
                               level_name(source);
      steps.push_back(CrossLevelStep{target, source,
                                     nn::MultiHeadAttention::create(store, name + ".attn", d, config.heads, rng),
                                     nn::GatedFusion::create(store, name + ".fuse", d, rng)});
    }
    n.hops.push_back(std::move(steps));
  }
  n.enhance_attention = nn::MultiHeadAttention::create(store, "global.enhance.attn", d, config.heads, rng);
  n.enhance_fusion = nn::ResidualFusion::create(store, "global.enhance.fusion", d, rng);
  return n;
}

GlobalGraph GlobalGraphNetwork::initial(num::Tape& tape) const {
  return GlobalGraph{tape.param(*initial_sentences), tape.param(*initial_paragraphs),
                     tape.param(*initial_documents)};
}

GlobalGraph GlobalGraphNetwork::compress_receive(num::Tape& tape, const LocalGraph& local,
                                                 const GlobalGraph& global, ReceptionTrace* trace) const {
  GlobalGraph out = global;
  auto receive = [&](BankLevel level, const nn::MultiHeadAttention& attn, const nn::GatedFusion& fuse,
                     const Value& sources, bool present) {
    if (!present) {
      if (trace) trace->skipped.push_back(level);
      return;
    }
    const Value& state = bank(global, level);
    bank(out, level) = fuse(tape, state, attn(tape, state, sources));
  };
  receive(BankLevel::kSentence, receive_sentences, fuse_sentences, local.sentences, local.sentence_count() > 0);
  receive(BankLevel::kParagraph, receive_paragraphs, fuse_paragraphs, local.paragraphs, local.paragraph_count() > 0);
  receive(BankLevel::kDocument, receive_documents, fuse_documents, local.segment, true);
  return out;
}

GlobalGraph GlobalGraphNetwork::hop(num::Tape& tape, const GlobalGraph& global, std::size_t index) const {
  if (index >= hops.size()) {
    throw std::out_of_range("global hop " + std::to_string(index) + " of " + std::to_string(hops.size()));
  }
  GlobalGraph g = global;
  for (const auto& step : hops[index]) {
    const Value target = bank(g, step.target);
    const Value attended = step.attention(tape, target, bank(g, step.source));
    bank(g, step.target) = step.fusion(tape, target, attended);
  }
  return g;
}

GlobalGraph GlobalGraphNetwork::run_hops(num::Tape& tape, GlobalGraph global, std::size_t count) const {
  if (count > hops.size()) {
    throw std::out_of_range("requested " + std::to_string(count) + " global hops, configured " +
                            std::to_string(hops.size()));
  }
  for (std::size_t h = 0; h < count; ++h) global = hop(tape, global, h);
  return global;
}

Value GlobalGraphNetwork::enhance_local(num::Tape& tape, const LocalGraph& local,
                                        const GlobalGraph& global) const {
  return enhance_fusion(tape, enhance_attention(tape, local.paragraphs, global.paragraphs), local.paragraphs);
}

SelectionHead SelectionHead::create(num::ParamStore& store, std::size_t dim, num::Rng& rng) {
  return SelectionHead{nn::Linear::create(store, "select.score", dim, 1, true, rng)};
}

Value SelectionHead::logits(num::Tape& tape, const Value& enhanced) const {
  return num::reshape(score(tape, enhanced), {enhanced.rows()});
}

SelectionOutput selection_loss(num::Tape& tape, const SelectionHead& head, const Value& enhanced,
                               std::span<const int> labels) {
  if (labels.size() != enhanced.rows()) {
    throw num::DimensionError("selection_loss: " + std::to_string(labels.size()) + " labels for " +
                              std::to_string(enhanced.rows()) + " paragraphs");
  }
  Value logits = head.logits(tape, enhanced);
  Value loss = num::bce_with_logits(logits, labels);
  return {std::move(logits), std::move(loss)};
}

}  // namespace cgsn
