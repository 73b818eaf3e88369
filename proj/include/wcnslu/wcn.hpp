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

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wcnslu/frame.hpp"
#include "wcnslu/subword.hpp"

namespace wcnslu {

struct Candidate {
  std::string word;
  double posterior = 1.0;  // in [0, 1]

  bool operator==(const Candidate&) const = default;
};

struct Bin {
  std::vector<Candidate> candidates;

  bool operator==(const Bin&) const = default;
};

// Ordered bins of competing ASR candidates.
struct WordConfusionNetwork {
  std::vector<Bin> bins;
  std::string utterance_id;

  // Throws InvalidWcn (empty network, empty bin, empty or duplicate word) or
  // InvalidProbability (posterior outside [0,1]).
  void validate() const;
  std::size_t num_candidates() const;

  bool operator==(const WordConfusionNetwork&) const = default;
};

// The previous system turn as act-slot-value triplets (possibly none).
struct SystemAct {
  std::vector<Triplet> triplets;

  // Every act non-empty; a value requires a slot.
  void validate() const;

  bool operator==(const SystemAct&) const = default;
};

struct PruneConfig {
  std::set<std::string> interjections = default_interjections();
  double prob_threshold = 0.001;
  std::string null_token = "!null";

  static std::set<std::string> default_interjections();
  void validate() const;
};

// Static map used to split compound act/slot names, e.g. pricerange -> price range.
using NameSplitMap = std::map<std::string, std::vector<std::string>>;
NameSplitMap default_name_split_map();

struct FlatWord {
  std::string word;
  double posterior = 1.0;
  std::size_t bin = 0;

  bool operator==(const FlatWord&) const = default;
};

enum class TokenRole { kCls, kWcn, kSep1, kSystemAct, kSep2 };

struct TokenGroup {
  TokenRole role = TokenRole::kCls;
  std::size_t bin = 0;        // kWcn: bin index
  std::size_t word = 0;       // kWcn: candidate index inside the bin
  std::size_t flat_word = 0;  // kWcn: index into EncodedInput::words
  std::size_t act_token = 0;  // kSystemAct: index among system-act tokens
};

// Parallel per-token sequences fed to the encoder plus the grouping needed
// to pool sub-words back to words and bins.
struct EncodedInput {
  std::vector<std::size_t> token_ids;
  std::vector<std::size_t> position_ids;
  std::vector<std::size_t> segment_ids;
  std::vector<double> probs;
  std::vector<TokenGroup> groups;
  std::vector<std::string> tokens;
  std::vector<FlatWord> words;
  std::size_t num_bins = 0;
  std::size_t num_act_tokens = 0;
  bool has_system_act = true;

  std::size_t length() const { return token_ids.size(); }
  // Rows after bin aggregation: [CLS], bins, [SEP], act tokens, [SEP].
  std::size_t t_prime() const { return num_bins + num_act_tokens + (has_system_act ? 3 : 2); }
};

// Drops candidates below the threshold, interjections and the null token,
// then bins left empty. Posteriors are kept as-is. Throws AllBinsPruned.
WordConfusionNetwork prune_wcn(const WordConfusionNetwork& wcn, const PruneConfig& cfg);

std::vector<FlatWord> flatten_wcn(const WordConfusionNetwork& wcn);

// a1 s1 v1 ... aK sK vK with empty fields skipped, compound act/slot names
// split through the map and values split on whitespace.
std::vector<std::string> linearize_system_act(const SystemAct& act, const NameSplitMap& splitter);

struct AssembleOptions {
  bool include_system_act = true;
};

// [CLS] Tok(flattened WCN) [SEP] Tok(system act) [SEP]. Sub-words inherit the
// posterior of their word; every token of bin m gets position m + 1 ([CLS] is
// 0), and positions continue consecutively after the WCN span. Segment 0 runs
// through the first [SEP], segment 1 afterwards.
EncodedInput assemble_input(const WordConfusionNetwork& wcn, const SystemAct& act,
                            const Vocab& vocab, const NameSplitMap& splitter,
                            const AssembleOptions& opts = {});

}  // namespace wcnslu
