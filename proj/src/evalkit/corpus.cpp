// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/evalkit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace cgsn::eval {

using nlohmann::json;

namespace {

std::string first_answer_text(const json& answer) {
  if (answer.value("unanswerable", false)) return "Unanswerable";
  if (auto ff = answer.value("free_form_answer", std::string()); !ff.empty()) return ff;
  if (answer.contains("extractive_spans") && answer["extractive_spans"].is_array()) {
    std::string out;
    for (const auto& s : answer["extractive_spans"]) {
      if (!out.empty()) out += ", ";
      out += s.get<std::string>();
    }
    if (!out.empty()) return out;
  }
  if (answer.contains("yes_no") && answer["yes_no"].is_boolean()) return answer["yes_no"].get<bool>() ? "Yes" : "No";
  return {};
}

}  // namespace

std::vector<Instance> parse_qasper(const std::string& text, const std::string& source, QasperStats* stats) {
  QasperStats local;
  std::vector<Instance> out;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": " + e.what());
  }
  if (!root.is_object()) throw ValidationError(source + ": expected an object of papers keyed by id");

  for (const auto& [paper_id, paper] : root.items()) {
    const std::string where = source + ": paper " + paper_id;
    try {
      ++local.papers;
      Document doc;
      doc.id = paper_id;
      std::unordered_map<std::string, std::size_t> index;
      for (const auto& section : paper.at("full_text")) {
        for (const auto& para : section.at("paragraphs")) {
          const auto raw = para.get<std::string>();
          auto sentences = split_sentences(raw);
          if (sentences.empty()) continue;
          index.emplace(raw, doc.paragraphs.size());
          doc.paragraphs.push_back(std::move(sentences));
        }
      }
      if (doc.paragraphs.empty()) throw ValidationError(where + ": no paragraphs");

      std::size_t q = 0;
      for (const auto& qa : paper.at("qas")) {
        ++local.questions;
        Instance inst;
        inst.id = qa.value("question_id", paper_id + "-" + std::to_string(q));
        inst.question = qa.at("question").get<std::string>();
        inst.document = doc;
        const auto& answers = qa.at("answers");
        if (!answers.empty()) {
          const json& a = answers.front().contains("answer") ? answers.front().at("answer") : answers.front();
          inst.answer = first_answer_text(a);
          const char* field = a.contains("evidence") ? "evidence" : "highlighted_evidence";
          if (a.contains(field)) {
            for (const auto& e : a.at(field)) {
              const auto it = index.find(e.get<std::string>());
              if (it == index.end()) {
                ++local.unmatched_evidence;
              } else {
                ++local.matched_evidence;
                inst.evidence.push_back(it->second);
              }
            }
          }
        }
        std::sort(inst.evidence.begin(), inst.evidence.end());
        inst.evidence.erase(std::unique(inst.evidence.begin(), inst.evidence.end()), inst.evidence.end());
        out.push_back(std::move(inst));
        ++q;
      }
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (stats) *stats = local;
  return out;
}

std::vector<Instance> ingest_qasper(const std::string& path, QasperStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open Qasper file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_qasper(buf.str(), path, stats);
}

std::vector<std::size_t> lexical_baseline(const Instance& instance, std::size_t k) {
  if (k == 0) throw std::invalid_argument("lexical_baseline: k must be positive");
  const auto q = tokenize(instance.question);
  const std::set<std::string> question(q.begin(), q.end());
  const std::size_t n = instance.document.paragraph_count();
  std::vector<std::size_t> overlap(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto toks = tokenize(instance.document.paragraph_text(i));
    const std::set<std::string> words(toks.begin(), toks.end());
    for (const auto& w : words) overlap[i] += question.count(w);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return overlap[a] > overlap[b]; });
  order.resize(std::min(k, n));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace cgsn::eval
