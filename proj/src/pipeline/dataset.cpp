// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/pipeline/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace cgsn {

using nlohmann::json;

std::string Document::paragraph_text(std::size_t index) const {
  std::string out;
  for (const auto& s : paragraphs.at(index)) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

namespace {

Instance parse_record(const json& j, const std::string& where, DatasetStats& stats) {
  if (!j.is_object()) throw ValidationError(where + ": record is not an object");
  Instance inst;
  try {
    inst.id = j.at("id").get<std::string>();
    inst.question = j.at("question").get<std::string>();
    inst.answer = j.value("answer", std::string());
    std::vector<std::vector<std::string>> raw = j.at("paragraphs").get<std::vector<std::vector<std::string>>>();
    std::vector<long long> evidence = j.value("evidence", std::vector<long long>{});

    std::vector<long long> remap(raw.size(), -1);
    for (std::size_t p = 0; p < raw.size(); ++p) {
      std::size_t tokens = 0;
      for (const auto& s : raw[p]) tokens += tokenize(s).size();
      if (tokens == 0) {
        ++stats.dropped_paragraphs;
        std::cerr << "warning: " << where << ": dropping empty paragraph " << p << "\n";
        continue;
      }
      remap[p] = static_cast<long long>(inst.document.paragraphs.size());
      inst.document.paragraphs.push_back(std::move(raw[p]));
    }
    inst.document.id = inst.id;
    for (long long e : evidence) {
      if (e < 0 || static_cast<std::size_t>(e) >= raw.size()) {
        throw ValidationError(where + ": evidence index " + std::to_string(e) + " outside " +
                              std::to_string(raw.size()) + " paragraphs");
      }
      if (remap[e] < 0) {
        ++stats.dropped_evidence;
        continue;
      }
      inst.evidence.push_back(static_cast<std::size_t>(remap[e]));
    }
  } catch (const json::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
  if (inst.document.paragraphs.empty()) throw ValidationError(where + ": document has no paragraphs");
  if (tokenize(inst.question).empty()) throw ValidationError(where + ": empty question");
  std::sort(inst.evidence.begin(), inst.evidence.end());
  inst.evidence.erase(std::unique(inst.evidence.begin(), inst.evidence.end()), inst.evidence.end());
  return inst;
}

}  // namespace

std::vector<Instance> parse_dataset(const std::string& text, const std::string& source, DatasetStats* stats) {
  DatasetStats local;
  std::vector<Instance> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(where + ": " + e.what());
    }
    out.push_back(parse_record(j, where, local));
  }
  if (stats) *stats = local;
  return out;
}

std::vector<Instance> read_dataset(const std::string& path, DatasetStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open dataset " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), path, stats);
}

std::string serialize_dataset(const std::vector<Instance>& instances) {
  std::string out;
  for (const auto& inst : instances) {
    json j;
    j["id"] = inst.id;
    j["question"] = inst.question;
    j["paragraphs"] = inst.document.paragraphs;
    j["evidence"] = inst.evidence;
    j["answer"] = inst.answer;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_dataset(const std::string& path, const std::vector<Instance>& instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write dataset " + path);
  out << serialize_dataset(instances);
}

TokenizedInstance tokenize_instance(const Instance& instance, const Vocabulary& vocab) {
  TokenizedInstance t;
  t.id = instance.id;
  t.question = vocab.encode(instance.question);
  for (const auto& para : instance.document.paragraphs) {
    TokenizedParagraph p;
    for (const auto& s : para) {
      auto ids = vocab.encode(s);
      if (!ids.empty()) p.sentences.push_back(std::move(ids));
    }
    t.paragraphs.push_back(std::move(p));
  }
  t.labels.assign(t.paragraphs.size(), 0);
  for (auto e : instance.evidence) t.labels.at(e) = 1;
  return t;
}

std::vector<TokenizedInstance> tokenize_dataset(const std::vector<Instance>& instances, const Vocabulary& vocab) {
  std::vector<TokenizedInstance> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(tokenize_instance(inst, vocab));
  return out;
}

Vocabulary build_dataset_vocab(const std::vector<Instance>& instances) {
  std::vector<std::string> corpus;
  for (const auto& inst : instances) {
    corpus.push_back(inst.question);
    for (const auto& para : inst.document.paragraphs) corpus.insert(corpus.end(), para.begin(), para.end());
  }
  return build_vocab(corpus);
}

}  // namespace cgsn
