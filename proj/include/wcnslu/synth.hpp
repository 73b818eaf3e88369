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
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "wcnslu/data.hpp"

namespace wcnslu {

// How the previous system turn is chosen for a template.
enum class SystemMode {
  kAny,      // a random act from the generic pool
  kRequest,  // request(slot) for a random informable slot; "{slot}" binds to it
  kConfirm,  // expl-conf(slot=value) over a random informable slot
};

// Utterance text with "{food}"-style placeholders naming informable slots.
// Label values may use the same placeholders, and "{slot}" under kRequest.
struct SynthTemplate {
  std::string text;
  std::vector<Triplet> labels;
  SystemMode system = SystemMode::kAny;
};

struct SynthConfig {
  std::map<std::string, std::vector<std::string>> values = default_values();
  std::vector<SynthTemplate> templates = default_templates();
  std::size_t n_train = 2000;
  std::size_t n_valid = 500;
  std::size_t n_test = 500;
  // Per clean word, probability that the bin gains distractors.
  double confusion_rate = 0.3;
  std::size_t max_distractors = 3;
  double concentration = 1.0;
  // When set the correct word carries the largest posterior with
  // probability top_prob; otherwise it never does.
  bool informative_noise = true;
  double top_prob = 0.8;
  // Probability of an extra interjection bin, and of a "!null" candidate in
  // a noisy bin.
  double interjection_rate = 0.05;
  double null_rate = 0.1;
  // Fraction of each slot's values withheld from train/valid; that share of
  // test examples is forced to mention a withheld value.
  double unseen_value_fraction = 0.0;
  // Probability that a training slot value is replaced by a fresh
  // pseudo-word, giving the value distribution a long tail of rare items.
  double rare_value_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  static std::map<std::string, std::vector<std::string>> default_values();
  static std::vector<SynthTemplate> default_templates();
};

void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);

struct SynthSplits {
  Dataset train;
  Dataset valid;
  Dataset test;
  std::vector<std::string> unseen_values;
};

// Fully determined by the config (including seed). A template instantiation
// (template and its slot values) lands in exactly one split; templates
// without slot values are shared by all splits.
SynthSplits generate_synthetic(const SynthConfig& cfg);

}  // namespace wcnslu
