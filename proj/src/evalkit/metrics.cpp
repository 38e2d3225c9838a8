// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/evalkit/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace cgsn::eval {

PrecisionRecall evidence_f1(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& gold) {
  const std::set<std::size_t> p(predicted.begin(), predicted.end());
  const std::set<std::size_t> g(gold.begin(), gold.end());
  if (p.empty() && g.empty()) return {1.0, 1.0, 1.0};
  if (p.empty() || g.empty()) return {};
  std::size_t hit = 0;
  for (auto i : p) hit += g.count(i);
  PrecisionRecall r;
  r.precision = static_cast<double>(hit) / static_cast<double>(p.size());
  r.recall = static_cast<double>(hit) / static_cast<double>(g.size());
  r.f1 = hit == 0 ? 0.0 : 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::vector<std::string> ngram_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) {
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
    out.push_back(std::move(w));
  }
  return out;
}

std::optional<double> rep_inter(const std::vector<std::string>& paragraphs, std::size_t n) {
  if (n == 0) throw std::invalid_argument("rep_inter: n must be positive");
  std::set<std::vector<std::string>> unique;
  std::size_t total = 0;
  for (const auto& p : paragraphs) {
    const auto toks = ngram_tokens(p);
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      unique.emplace(toks.begin() + static_cast<std::ptrdiff_t>(i), toks.begin() + static_cast<std::ptrdiff_t>(i + n));
      ++total;
    }
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

MetricReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Instance>& gold) {
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) by_id[p.id] = &p;

  MetricReport report;
  double rep_sum[3] = {0, 0, 0};
  std::size_t rep_count[3] = {0, 0, 0};
  for (const auto& inst : gold) {
    const auto it = by_id.find(inst.id);
    if (it == by_id.end()) throw ValidationError("evaluate: no prediction for instance " + inst.id);
    const Prediction& pred = *it->second;
    InstanceMetrics m;
    m.id = inst.id;
    m.evidence = evidence_f1(pred.indices, inst.evidence);
    std::vector<std::string> texts;
    for (auto j : pred.indices) {
      if (j >= inst.document.paragraph_count()) {
        throw ValidationError("evaluate: predicted index " + std::to_string(j) + " outside instance " + inst.id);
      }
      texts.push_back(inst.document.paragraph_text(j));
    }
    for (std::size_t n = 1; n <= 3; ++n) {
      m.rep_inter[n - 1] = rep_inter(texts, n);
      if (m.rep_inter[n - 1]) {
        rep_sum[n - 1] += *m.rep_inter[n - 1];
        ++rep_count[n - 1];
      }
    }
    report.precision += m.evidence.precision;
    report.recall += m.evidence.recall;
    report.evidence_f1 += m.evidence.f1;
    report.instances.push_back(std::move(m));
  }
  report.n_instances = report.instances.size();
  if (report.n_instances > 0) {
    const auto n = static_cast<double>(report.n_instances);
    report.precision /= n;
    report.recall /= n;
    report.evidence_f1 /= n;
  }
  double mean = 0;
  std::size_t defined = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (rep_count[k] == 0) continue;
    report.rep_inter[k] = rep_sum[k] / static_cast<double>(rep_count[k]);
    mean += *report.rep_inter[k];
    ++defined;
  }
  if (defined > 0) report.rep_inter_mean = mean / static_cast<double>(defined);
  return report;
}

std::string MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["evidence_f1"] = evidence_f1;
  j["precision"] = precision;
  j["recall"] = recall;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::string key = "rep_inter_" + std::to_string(k + 1);
    j[key] = rep_inter[k] ? nlohmann::ordered_json(*rep_inter[k]) : nlohmann::ordered_json(nullptr);
  }
  j["rep_inter_mean"] = rep_inter_mean ? nlohmann::ordered_json(*rep_inter_mean) : nlohmann::ordered_json(nullptr);
  j["n_instances"] = n_instances;
  return j.dump(2);
}

ThresholdSweep tune_threshold(const std::vector<Prediction>& predictions, const std::vector<Instance>& gold,
                              const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("tune_threshold: empty grid");
  ThresholdSweep sweep;
  double best = -1.0;
  for (double tau : grid) {
    std::vector<Prediction> at = predictions;
    for (auto& p : at) p.indices = select_from_probabilities(p.probabilities, tau);
    const double f1 = evaluate(at, gold).evidence_f1;
    sweep.f1.emplace_back(tau, f1);
    if (f1 > best) {
      best = f1;
      sweep.best = tau;
    }
  }
  return sweep;
}

}  // namespace cgsn::eval
