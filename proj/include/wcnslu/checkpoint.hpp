/*
 * Copyright 2026 The wcnslu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <memory>
#include <string>

#include "json.hpp"
#include "wcnslu/model.hpp"

namespace wcnslu {

// A checkpoint is a directory:
//   manifest.json  model config, parameter table (name, shape, dtype, byte
//                  offset), best validation F1 and free-form training metadata
//   params.bin     every parameter as little-endian float64, row-major, in
//                  registration order
//   vocab.txt      one token per line
//   ontology.json
// Writing the same model twice produces identical bytes.
struct CheckpointInfo {
  double best_valid_f1 = 0.0;
  nlohmann::json train_config = nlohmann::json::object();
};

void save_checkpoint(const SluModel& model, const CheckpointInfo& info, const std::string& dir);

struct LoadedCheckpoint {
  std::unique_ptr<SluModel> model;
  CheckpointInfo info;
};

// Throws Io, Parse or ShapeMismatch when the payload does not match the
// manifest or the model layout.
LoadedCheckpoint load_checkpoint(const std::string& dir);

}  // namespace wcnslu
