// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/pipeline/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cgsn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kFormat = 1;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("checkpoint: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void put_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xff));
    bits >>= 8;
  }
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const std::string& dir, const CgsnModel& model, const Vocabulary& vocab,
                     const TrainingMetadata& training) {
  fs::create_directories(dir);
  json manifest;
  manifest["format"] = kFormat;
  manifest["config"] = serialize_config(model.config());
  manifest["vocab_size"] = model.vocab_size();
  manifest["vocab_fingerprint"] = vocab.fingerprint();
  manifest["training"] = {{"step", training.step}, {"epoch", training.epoch}, {"seed", training.seed}};

  std::string blob;
  json entries = json::array();
  for (const num::Parameter* p : model.store.all()) {
    entries.push_back({{"name", p->name()}, {"shape", p->shape()}, {"offset", blob.size()}});
    for (double v : p->value().data()) put_le(blob, v);
  }
  manifest["parameters"] = std::move(entries);

  std::ofstream(fs::path(dir) / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
  std::ofstream(fs::path(dir) / "params.bin", std::ios::binary) << blob;
  vocab.save((fs::path(dir) / "vocab.txt").string());
}

Checkpoint load_checkpoint(const std::string& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(fs::path(dir) / "manifest.json"));
  } catch (const json::parse_error& e) {
    throw ValidationError("checkpoint: " + dir + "/manifest.json: " + e.what());
  }
  try {
    if (manifest.at("format").get<int>() != kFormat) throw ValidationError("checkpoint: unsupported format");
    const ModelConfig config = parse_config(manifest.at("config").get<std::string>(), dir + "/manifest.json");
    Vocabulary vocab = Vocabulary::load((fs::path(dir) / "vocab.txt").string());
    if (vocab.fingerprint() != manifest.at("vocab_fingerprint").get<std::string>()) {
      throw ValidationError("checkpoint: vocabulary does not match manifest fingerprint");
    }
    const auto vocab_size = manifest.at("vocab_size").get<std::size_t>();
    if (vocab.size() != vocab_size) throw ValidationError("checkpoint: vocabulary size mismatch");

    CgsnModel model = CgsnModel::create(config, vocab_size);
    const std::string blob = read_file(fs::path(dir) / "params.bin");
    const auto& entries = manifest.at("parameters");
    if (entries.size() != model.store.size()) {
      throw ValidationError("checkpoint: " + std::to_string(entries.size()) + " tensors, model has " +
                            std::to_string(model.store.size()));
    }
    for (const auto& e : entries) {
      const auto name = e.at("name").get<std::string>();
      num::Parameter* p = model.store.find(name);
      if (!p) throw ValidationError("checkpoint: unknown parameter " + name);
      if (e.at("shape").get<num::Shape>() != p->shape()) {
        throw ValidationError("checkpoint: shape mismatch for " + name);
      }
      const auto offset = e.at("offset").get<std::size_t>();
      const std::size_t n = p->value().size();
      if (offset + 8 * n > blob.size()) throw ValidationError("checkpoint: params.bin truncated at " + name);
      std::vector<double> data(n);
      for (std::size_t i = 0; i < n; ++i) data[i] = get_le(blob.data() + offset + 8 * i);
      p->assign(std::move(data));
    }
    const auto& t = manifest.at("training");
    TrainingMetadata training{t.at("step").get<std::size_t>(), t.at("epoch").get<std::size_t>(),
                              t.at("seed").get<std::uint64_t>()};
    return Checkpoint{std::move(model), std::move(vocab), training};
  } catch (const json::exception& e) {
    throw ValidationError("checkpoint: " + dir + ": " + e.what());
  }
}

}  // namespace cgsn
