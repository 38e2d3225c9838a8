// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/pipeline/select.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cgsn {

using nlohmann::json;

std::vector<std::size_t> select_from_probabilities(const std::vector<double>& probabilities, double threshold) {
  std::vector<std::size_t> out;
  if (probabilities.empty()) return out;
  std::size_t best = 0;
  for (std::size_t j = 0; j < probabilities.size(); ++j) {
    if (probabilities[j] > threshold) out.push_back(j);
    if (probabilities[j] > probabilities[best]) best = j;
  }
  if (out.empty()) out.push_back(best);
  return out;
}

Prediction select_evidence(const CgsnModel& model, const TokenizedInstance& instance, double threshold) {
  Prediction p;
  p.id = instance.id;
  for (double e : forward_document(model, instance).logits) p.probabilities.push_back(1.0 / (1.0 + std::exp(-e)));
  p.indices = select_from_probabilities(p.probabilities, threshold);
  return p;
}

std::string serialize_predictions(const std::vector<Prediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    out += json::array({p.id, p.indices, p.probabilities}).dump();
    out += '\n';
  }
  return out;
}

std::vector<Prediction> parse_predictions(const std::string& text, const std::string& source) {
  std::vector<Prediction> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    try {
      const json j = json::parse(line);
      if (!j.is_array() || j.size() != 3) throw ValidationError(where + ": expected [id, indices, probabilities]");
      out.push_back(Prediction{j[0].get<std::string>(), j[1].get<std::vector<std::size_t>>(),
                               j[2].get<std::vector<double>>()});
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return out;
}

void write_predictions(const std::string& path, const std::vector<Prediction>& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write predictions " + path);
  out << serialize_predictions(predictions);
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open predictions " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_predictions(buf.str(), path);
}

}  // namespace cgsn
