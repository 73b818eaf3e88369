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

#include "wcnslu/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wcnslu/error.hpp"

namespace wcnslu {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "wcnslu-checkpoint";
constexpr int kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "params.bin is written in host order and must be little-endian");

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

void save_checkpoint(const SluModel& model, const CheckpointInfo& info, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());

  const ParamStore& store = model.params();
  std::string payload;
  json table = json::array();
  for (ParamId id = 0; id < store.size(); ++id) {
    const Parameter& p = store[id];
    table.push_back({{"name", p.name},
                     {"shape", {p.value.rows(), p.value.cols()}},
                     {"dtype", "float64"},
                     {"offset", payload.size()},
                     {"decay", p.decay}});
    const auto* bytes = reinterpret_cast<const char*>(p.value.data());
    payload.append(bytes, p.value.size() * sizeof(double));
  }

  json manifest = {{"format", kFormat},
                   {"version", kVersion},
                   {"model_config", model.config()},
                   {"train_config", info.train_config},
                   {"best_valid_f1", info.best_valid_f1},
                   {"params_file", "params.bin"},
                   {"params_bytes", payload.size()},
                   {"vocab_file", "vocab.txt"},
                   {"ontology_file", "ontology.json"},
                   {"params", std::move(table)}};

  const fs::path root(dir);
  write_file(root / "params.bin", payload);
  model.vocab().save((root / "vocab.txt").string());
  model.ontology().save((root / "ontology.json").string());
  write_file(root / "manifest.json", manifest.dump(2) + "\n");
}

LoadedCheckpoint load_checkpoint(const std::string& dir) {
  const fs::path root(dir);
  json manifest;
  try {
    manifest = json::parse(read_file(root / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "manifest.json: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != kFormat || manifest.value("version", 0) != kVersion) {
    throw Error(ErrorCode::kParse, dir + " is not a version 1 checkpoint");
  }

  LoadedCheckpoint out;
  ModelConfig config;
  try {
    config = manifest.at("model_config").get<ModelConfig>();
    out.info.best_valid_f1 = manifest.at("best_valid_f1").get<double>();
    out.info.train_config = manifest.value("train_config", json::object());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "manifest.json: " + std::string(e.what()));
  }
  Vocab vocab = Vocab::load((root / manifest.value("vocab_file", "vocab.txt")).string());
  Ontology ontology = Ontology::load((root / manifest.value("ontology_file", "ontology.json")).string());
  out.model = std::make_unique<SluModel>(config, std::move(vocab), std::move(ontology), 0);

  const std::string payload = read_file(root / manifest.value("params_file", "params.bin"));
  ParamStore& store = out.model->params();
  const json& table = manifest.at("params");
  if (!table.is_array() || table.size() != store.size()) {
    throw Error(ErrorCode::kShapeMismatch, "checkpoint has " + std::to_string(table.size()) +
                                               " parameters, model expects " +
                                               std::to_string(store.size()));
  }
  for (const json& entry : table) {
    const std::string name = entry.at("name").get<std::string>();
    auto id = store.find(name);
    if (!id) throw Error(ErrorCode::kShapeMismatch, "unknown parameter " + name);
    Tensor& value = store[*id].value;
    const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
    if (entry.value("dtype", "") != "float64" || shape.size() != 2 || shape[0] != value.rows() ||
        shape[1] != value.cols()) {
      throw Error(ErrorCode::kShapeMismatch, "parameter " + name + " does not match " +
                                                 value.shape_string());
    }
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    const std::size_t bytes = value.size() * sizeof(double);
    if (offset + bytes > payload.size()) {
      throw Error(ErrorCode::kShapeMismatch, "params.bin is truncated at " + name);
    }
    std::memcpy(value.data(), payload.data() + offset, bytes);
  }
  return out;
}

}  // namespace wcnslu
