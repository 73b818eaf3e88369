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

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wcnslu/data.hpp"
#include "wcnslu/model.hpp"
#include "wcnslu/optim.hpp"

namespace wcnslu {

struct TrainConfig {
  ModelConfig model;
  double base_lr = 1e-3;
  double warmup = 0.1;
  bool linear_decay = true;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  // Worker threads for per-example gradients and inference. Results do not
  // depend on this value.
  std::size_t threads = 1;

  void validate() const;
};

// Flat object: training keys plus every ModelConfig key. Learning-rate
// presets "5e-5", "3e-5" and "2e-5" may be given as strings.
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct PreparedExample {
  EncodedInput input;
  SemanticFrame gold;
  std::size_t index = 0;  // position in the source dataset
};

// Examples whose network prunes to nothing are skipped and counted.
std::vector<PreparedExample> prepare_examples(const SluModel& model, const Dataset& data,
                                              std::size_t* skipped = nullptr);

// Mini-batch AdamW driver over one model.
class Optimizer {
 public:
  Optimizer(SluModel& model, const TrainConfig& config, std::int64_t total_steps);

  // One update on the mean loss of the batch; returns that mean loss.
  double step(std::span<const PreparedExample* const> batch);
  std::int64_t steps() const { return state_.t; }
  double last_lr() const { return last_lr_; }
  double last_grad_norm() const { return last_grad_norm_; }

 private:
  SluModel& model_;
  const TrainConfig& config_;
  LrSchedule schedule_;
  AdamState state_;
  double last_lr_ = 0.0;
  double last_grad_norm_ = 0.0;
};

std::vector<SemanticFrame> predict_all(const SluModel& model, const Dataset& data,
                                       std::size_t threads = 1);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_f1 = 0.0;
  double valid_acc = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  std::unique_ptr<SluModel> model;  // parameters of the best validation epoch
  double best_valid_f1 = 0.0;
  std::size_t best_epoch = 0;
  std::vector<EpochLog> log;
  std::size_t skipped = 0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Builds the ontology from train, trains for config.epochs and keeps the
// parameters of the epoch with the highest validation F1 (earliest on ties).
// When log_path is non-empty the file is truncated and one JSON line per
// epoch is appended.
TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& valid_set,
                  const Vocab& vocab, const std::string& log_path = "",
                  const EpochCallback& on_epoch = {});

}  // namespace wcnslu
