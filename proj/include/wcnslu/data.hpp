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

#include <map>
#include <string>
#include <vector>

#include "wcnslu/frame.hpp"
#include "wcnslu/ontology.hpp"
#include "wcnslu/subword.hpp"
#include "wcnslu/wcn.hpp"

namespace wcnslu {

struct Example {
  std::string id;
  WordConfusionNetwork wcn;
  SystemAct system_act;
  SemanticFrame labels;
  bool operator==(const Example&) const = default;
};

using Dataset = std::vector<Example>;

// One JSON object per line with exactly the fields id, wcn, system_act and
// labels. Triplets are [act, slot, value] arrays; shorter arrays are padded
// with empty strings. Blank lines are skipped. Throws ParseError with the
// 1-based line number (code Parse, InvalidProbability or InvalidWcn).
Dataset parse_dataset(const std::string& text);
Dataset load_dataset(const std::string& path);

std::string example_to_json(const Example& ex);
std::string dataset_to_jsonl(const Dataset& data);
void save_dataset(const Dataset& data, const std::string& path);

// Frames only, one {"id", "labels"} object per line (prediction files).
std::string frames_to_jsonl(const std::vector<std::string>& ids,
                            const std::vector<SemanticFrame>& frames);
// Accepts prediction files or full dataset files; reads "id" and "labels".
std::vector<std::pair<std::string, SemanticFrame>> load_frames(const std::string& path);

// Pairs and values observed in the (normalized) training labels. Throws
// EmptyLabels when no example carries a triplet.
Ontology build_ontology(const Dataset& train, const NameSplitMap& split_map);

// Lower-cased word counts over everything the tokenizer will see: WCN
// candidates, linearized system acts, label values and act/slot names.
std::map<std::string, std::size_t> count_words(const Dataset& data, const NameSplitMap& split_map);

Vocab build_vocab_from(const std::vector<const Dataset*>& sets, const NameSplitMap& split_map,
                       std::size_t max_size, std::size_t min_freq = 1);

}  // namespace wcnslu
