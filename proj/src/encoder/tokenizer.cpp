// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cgsn/model/encoder.hpp"

namespace cgsn {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      out.emplace_back(1, raw);
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    const auto b = cur.find_first_not_of(" \t\r\n");
    if (b != std::string::npos) {
      const auto e = cur.find_last_not_of(" \t\r\n");
      out.push_back(cur.substr(b, e - b + 1));
    }
    cur.clear();
  };
  for (char c : text) {
    cur.push_back(c);
    if (c == '.' || c == '?' || c == '!') flush();
  }
  flush();
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i) + kReserved).second) {
      throw std::invalid_argument("vocabulary: duplicate token '" + tokens_[i] + "'");
    }
  }
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  static const std::string reserved[kReserved] = {"[CLS]", "[SEP]", "[PAD]", "[UNK]"};
  if (id >= 0 && id < kReserved) return reserved[id];
  const auto k = static_cast<std::size_t>(id - kReserved);
  if (id < 0 || k >= tokens_.size()) throw std::out_of_range("vocabulary id " + std::to_string(id));
  return tokens_[k];
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& t : tokenize(text)) ids.push_back(id(t));
  return ids;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write vocabulary file " + path);
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read vocabulary file " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  return Vocabulary(std::move(tokens));
}

std::string Vocabulary::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x0a;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

Vocabulary build_vocab(std::span<const std::string> corpus, std::size_t min_freq) {
  if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& text : corpus) {
    for (auto& t : tokenize(text)) {
      auto [it, inserted] = counts.try_emplace(t, 0);
      if (inserted) order.push_back(t);
      ++it->second;
    }
  }
  std::vector<std::string> kept;
  for (auto& t : order)
    if (counts[t] >= min_freq) kept.push_back(t);
  return Vocabulary(std::move(kept));
}

std::vector<int> format_pair(std::span<const int> question, std::span<const int> paragraph,
                             std::size_t max_len) {
  if (question.empty()) throw std::invalid_argument("format_pair: empty question");
  if (max_len < 3 || question.size() > max_len - 3) {
    throw std::invalid_argument("format_pair: question of " + std::to_string(question.size()) +
                                " tokens does not fit max length " + std::to_string(max_len));
  }
  std::vector<int> out;
  out.reserve(max_len);
  out.push_back(Vocabulary::kCls);
  out.insert(out.end(), question.begin(), question.end());
  out.push_back(Vocabulary::kSep);
  const std::size_t budget = max_len - 3 - question.size();
  const std::size_t keep = std::min(budget, paragraph.size());
  out.insert(out.end(), paragraph.begin(), paragraph.begin() + static_cast<std::ptrdiff_t>(keep));
  out.push_back(Vocabulary::kSep);
  out.resize(max_len, Vocabulary::kPad);
  return out;
}

std::vector<int> format_pair(std::string_view question, std::string_view paragraph,
                             const Vocabulary& vocab, std::size_t max_len) {
  const auto q = vocab.encode(question);
  const auto p = vocab.encode(paragraph);
  return format_pair(q, p, max_len);
}

std::size_t TokenizedParagraph::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

}  // namespace cgsn
