// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint directory layout:
//   manifest.json  format version, config, vocabulary size and fingerprint, training
//                  metadata, and one {name, shape, offset} entry per parameter (offset in bytes)
//   params.bin     little-endian 64-bit floats of every parameter, concatenated in manifest order
//   vocab.txt      regular vocabulary tokens, one per line

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "cgsn/pipeline/model.hpp"

namespace cgsn {

struct TrainingMetadata {
  std::size_t step = 0;
  std::size_t epoch = 0;
  std::uint64_t seed = 0;
};

struct Checkpoint {
  CgsnModel model;
  Vocabulary vocab;
  TrainingMetadata training;
};

void save_checkpoint(const std::string& dir, const CgsnModel& model, const Vocabulary& vocab,
                     const TrainingMetadata& training);
Checkpoint load_checkpoint(const std::string& dir);

}  // namespace cgsn
