// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/evalkit/synthetic.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace cgsn::eval {

namespace {

struct Pools {
  std::size_t topics;
  std::size_t keys;
  std::size_t fillers;
};

Pools pools(std::size_t vocabulary, std::size_t key_words) {
  const std::size_t keys = key_words > 0 ? key_words : std::max<std::size_t>(2, vocabulary / 4);
  const std::size_t topics = vocabulary / 2;
  if (keys + topics >= vocabulary) return {topics, keys, 0};
  return {topics, keys, vocabulary - keys - topics};
}

class Writer {
 public:
  Writer(const Pools& p, std::mt19937_64& rng) : pools_(p), rng_(rng) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  // A topic word index outside `exclude`.
  std::size_t topic_except(const std::vector<std::size_t>& exclude) {
    for (;;) {
      const std::size_t t = pick(pools_.topics);
      if (std::find(exclude.begin(), exclude.end(), t) == exclude.end()) return t;
    }
  }

  std::string sentence(std::vector<std::string> words) {
    std::shuffle(words.begin(), words.end(), rng_);
    std::string out;
    for (const auto& w : words) out += w + " ";
    return out + ".";
  }

  std::vector<std::string> paragraph(std::size_t topic_a, std::size_t topic_b, std::size_t key) {
    return {sentence({"t" + std::to_string(topic_a), "t" + std::to_string(topic_b), filler()}),
            sentence({"k" + std::to_string(key), filler()})};
  }

 private:
  std::string filler() { return "f" + std::to_string(pick(pools_.fillers)); }

  Pools pools_;
  std::mt19937_64& rng_;
};

}  // namespace

void SyntheticSpec::validate() const {
  const Pools p = pools(vocabulary, key_words);
  if (p.keys < 2) throw ValidationError("synthetic: the key pool needs at least 2 words");
  if (documents == 0) throw ValidationError("synthetic: documents must be positive");
  if (segment_paragraphs == 0) throw ValidationError("synthetic: segment_paragraphs must be positive");
  if (paragraphs < 2) throw ValidationError("synthetic: 2 evidence paragraphs need at least 2 paragraphs");
  if (p.topics < 6 || p.fillers < 1) throw ValidationError("synthetic: vocabulary too small for 6 topic words and a filler");
  if (!(duplicate_rate >= 0.0 && duplicate_rate <= 1.0)) throw ValidationError("synthetic: duplicate_rate outside [0, 1]");
  const bool dup = duplicate_rate > 0.0;
  if (cross_segment) {
    if (paragraphs < segment_paragraphs + (dup ? 2 : 1)) {
      throw ValidationError("synthetic: cross-segment mode needs paragraphs beyond the first segment");
    }
  } else {
    if (segment_paragraphs < 2) throw ValidationError("synthetic: same-segment mode needs segments of 2+ paragraphs");
    if (dup && paragraphs <= segment_paragraphs) {
      throw ValidationError("synthetic: duplicates need a segment after the evidence segment");
    }
  }
}

std::vector<Instance> generate_corpus(const SyntheticSpec& spec) {
  spec.validate();
  const Pools p = pools(spec.vocabulary, spec.key_words);
  std::mt19937_64 rng(spec.seed);
  Writer w(p, rng);
  const std::size_t n = spec.paragraphs;
  const std::size_t seg = spec.segment_paragraphs;
  const std::size_t segments = (n + seg - 1) / seg;

  std::vector<Instance> out;
  for (std::size_t d = 0; d < spec.documents; ++d) {
    Instance inst;
    inst.id = spec.id_prefix + "-" + std::to_string(d);
    inst.document.id = inst.id;
    const std::size_t qa = w.pick(p.topics);
    const std::size_t qb = w.topic_except({qa});
    const std::size_t key = w.pick(p.keys);
    inst.question = "t" + std::to_string(qa) + " t" + std::to_string(qb) + " ?";
    const bool duplicate = std::bernoulli_distribution(spec.duplicate_rate)(rng);

    std::size_t anchor = 0;
    std::size_t bridge = 0;
    std::size_t earliest_duplicate = 0;
    if (spec.cross_segment) {
      anchor = w.pick(std::min(seg, n));
      bridge = seg + w.pick(n - seg);
      earliest_duplicate = seg;
    } else {
      std::vector<std::size_t> eligible;
      for (std::size_t s = 0; s < segments; ++s) {
        const std::size_t size = std::min(n, (s + 1) * seg) - s * seg;
        if (size >= 2 && (!duplicate || s + 1 < segments)) eligible.push_back(s);
      }
      const std::size_t s = eligible[w.pick(eligible.size())];
      const std::size_t begin = s * seg;
      const std::size_t size = std::min(n, begin + seg) - begin;
      anchor = begin + w.pick(size);
      do {
        bridge = begin + w.pick(size);
      } while (bridge == anchor);
      earliest_duplicate = begin + seg;
    }
    std::size_t copy = n;
    if (duplicate) {
      do {
        copy = earliest_duplicate + w.pick(n - earliest_duplicate);
      } while (copy == bridge);
    }

    std::vector<std::vector<std::string>> paras(n);
    paras[anchor] = w.paragraph(qa, qb, key);
    if (spec.cross_segment) {
      const std::size_t ba = w.topic_except({qa, qb});
      paras[bridge] = w.paragraph(ba, w.topic_except({qa, qb, ba}), key);
    } else {
      paras[bridge] = w.paragraph(qa, qb, key);
    }
    if (copy < n) paras[copy] = paras[anchor];
    for (std::size_t i = 0; i < n; ++i) {
      if (!paras[i].empty()) continue;
      std::size_t other_key = w.pick(p.keys - 1);
      if (other_key >= key) ++other_key;
      std::size_t ta = w.topic_except({qa, qb});
      const std::size_t tb = w.topic_except({qa, qb, ta});
      if (std::bernoulli_distribution(0.5)(rng)) ta = w.pick(2) == 0 ? qa : qb;
      paras[i] = w.paragraph(ta, tb, other_key);
    }
    inst.document.paragraphs = std::move(paras);
    inst.evidence = {std::min(anchor, bridge), std::max(anchor, bridge)};
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace cgsn::eval
