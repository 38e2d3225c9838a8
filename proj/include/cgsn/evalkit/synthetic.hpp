// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic long documents with two evidence paragraphs.
//
// Words come from three pools: topic words, key words and filler. Every paragraph
// holds a topic sentence (two topic words and a filler) and a key sentence (one key
// word and a filler). The question is two topic words.
//   anchor evidence  carries both question words and a key K
//   bridge evidence  carries K and two non-question topic words; in cross-segment mode
//                    it sits in a later segment than the anchor and only K links it to
//                    the question
//   distractors      never carry K; about half share one question word
// In same-segment mode both evidence paragraphs carry the question words and share a
// segment. A duplicate is a verbatim, unlabelled copy of the anchor placed in a later
// segment.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cgsn/pipeline/dataset.hpp"

namespace cgsn::eval {

struct SyntheticSpec {
  std::size_t documents = 100;
  std::size_t paragraphs = 12;          // per document
  std::size_t segment_paragraphs = 4;   // segment length assumed by the placement rules
  bool cross_segment = true;
  double duplicate_rate = 0.0;          // share of documents that receive a duplicate anchor
  std::size_t vocabulary = 64;          // distinct content words across all pools
  std::size_t key_words = 0;            // size of the key pool; 0 takes a quarter of the vocabulary
  std::uint64_t seed = 0;
  std::string id_prefix = "syn";

  // Throws ValidationError on inconsistent settings.
  void validate() const;
};

std::vector<Instance> generate_corpus(const SyntheticSpec& spec);

}  // namespace cgsn::eval
