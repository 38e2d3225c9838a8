// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/pipeline/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cgsn/pipeline/dataset.hpp"

namespace cgsn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ValidationError("config: bad value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config: bad boolean '" + value + "' for " + key);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Field {
  std::function<void(ModelConfig&, const std::string&)> set;
  std::function<std::string(const ModelConfig&)> get;
};

template <class T>
Field size_field(T ModelConfig::*member, const std::string& key) {
  return {[member, key](ModelConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); },
          [member](const ModelConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(double ModelConfig::*member, const std::string& key) {
  return {[member, key](ModelConfig& c, const std::string& v) { c.*member = parse_number<double>(key, v); },
          [member](const ModelConfig& c) { return format_double(c.*member); }};
}

Field bool_field(bool ModelConfig::*member, const std::string& key) {
  return {[member, key](ModelConfig& c, const std::string& v) { c.*member = parse_bool(key, v); },
          [member](const ModelConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["segment_paragraphs"] = size_field(&ModelConfig::segment_paragraphs, "segment_paragraphs");
    t["global_sentence_nodes"] = size_field(&ModelConfig::global_sentence_nodes, "global_sentence_nodes");
    t["global_paragraph_nodes"] = size_field(&ModelConfig::global_paragraph_nodes, "global_paragraph_nodes");
    t["global_document_nodes"] = size_field(&ModelConfig::global_document_nodes, "global_document_nodes");
    t["local_hops"] = size_field(&ModelConfig::local_hops, "local_hops");
    t["global_hops"] = size_field(&ModelConfig::global_hops, "global_hops");
    t["embed_dim"] = size_field(&ModelConfig::embed_dim, "embed_dim");
    t["hidden_dim"] = size_field(&ModelConfig::hidden_dim, "hidden_dim");
    t["heads"] = size_field(&ModelConfig::heads, "heads");
    t["max_len"] = size_field(&ModelConfig::max_len, "max_len");
    t["encoder_layers"] = size_field(&ModelConfig::encoder_layers, "encoder_layers");
    t["anchor"] = {[](ModelConfig& c, const std::string& v) {
                     if (v == "cls") {
                       c.anchor = ParagraphAnchor::kCls;
                     } else if (v == "last_sep") {
                       c.anchor = ParagraphAnchor::kLastSep;
                     } else {
                       throw ValidationError("config: anchor must be cls or last_sep, got '" + v + "'");
                     }
                   },
                   [](const ModelConfig& c) {
                     return std::string(c.anchor == ParagraphAnchor::kCls ? "cls" : "last_sep");
                   }};
    t["use_global_graph"] = bool_field(&ModelConfig::use_global_graph, "use_global_graph");
    t["use_memory"] = bool_field(&ModelConfig::use_memory, "use_memory");
    t["learning_rate"] = double_field(&ModelConfig::learning_rate, "learning_rate");
    t["warmup_proportion"] = double_field(&ModelConfig::warmup_proportion, "warmup_proportion");
    t["weight_decay"] = double_field(&ModelConfig::weight_decay, "weight_decay");
    t["beta1"] = double_field(&ModelConfig::beta1, "beta1");
    t["beta2"] = double_field(&ModelConfig::beta2, "beta2");
    t["epsilon"] = double_field(&ModelConfig::epsilon, "epsilon");
    t["max_grad_norm"] = double_field(&ModelConfig::max_grad_norm, "max_grad_norm");
    t["batch_size"] = size_field(&ModelConfig::batch_size, "batch_size");
    t["epochs"] = size_field(&ModelConfig::epochs, "epochs");
    t["threshold"] = double_field(&ModelConfig::threshold, "threshold");
    t["seed"] = size_field(&ModelConfig::seed, "seed");
    return t;
  }();
  return table;
}

}  // namespace

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ValidationError(std::string("config: ") + name + " must be positive");
  };
  positive(segment_paragraphs, "segment_paragraphs");
  positive(global_sentence_nodes, "global_sentence_nodes");
  positive(global_paragraph_nodes, "global_paragraph_nodes");
  positive(global_document_nodes, "global_document_nodes");
  positive(local_hops, "local_hops");
  positive(embed_dim, "embed_dim");
  positive(hidden_dim, "hidden_dim");
  positive(heads, "heads");
  positive(encoder_layers, "encoder_layers");
  positive(batch_size, "batch_size");
  positive(epochs, "epochs");
  if (hidden_dim % heads != 0) throw ValidationError("config: hidden_dim must be divisible by heads");
  if (hidden_dim % 2 != 0) throw ValidationError("config: hidden_dim must be even");
  if (max_len < 5) throw ValidationError("config: max_len must be at least 5");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("config: threshold must lie in (0, 1)");
  if (!(learning_rate > 0.0)) throw ValidationError("config: learning_rate must be positive");
  if (!(warmup_proportion >= 0.0 && warmup_proportion <= 1.0)) {
    throw ValidationError("config: warmup_proportion must lie in [0, 1]");
  }
  if (weight_decay < 0.0 || max_grad_norm < 0.0) throw ValidationError("config: negative regularizer");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0)) {
    throw ValidationError("config: Adam betas must lie in [0, 1) and epsilon must be positive");
  }
}

ModelConfig parse_config(const std::string& text, const std::string& source) {
  ModelConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) throw ValidationError(where + ": unknown key '" + key + "'");
    try {
      it->second.set(c, value);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

ModelConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize_config(const ModelConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

}  // namespace cgsn
