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
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wcnslu/wcn.hpp"

namespace wcnslu {

using ActSlot = std::pair<std::string, std::string>;

// Label inventory gathered from training data. All lists are sorted so class
// indices are deterministic.
class Ontology {
 public:
  Ontology() = default;
  // Takes pairs with their observed values; pairs with an empty value list
  // become no-value pairs.
  Ontology(const std::map<ActSlot, std::set<std::string>>& observed, NameSplitMap split_map);

  const std::vector<std::string>& acts() const { return acts_; }
  const std::vector<std::string>& slots() const { return slots_; }
  const std::vector<ActSlot>& act_slot_pairs() const { return pairs_; }
  const std::set<ActSlot>& no_value_pairs() const { return no_value_; }
  const NameSplitMap& name_split_map() const { return split_map_; }
  // Empty for no-value pairs and unknown pairs.
  const std::vector<std::string>& values_of(const ActSlot& pair) const;
  // Indices into act_slot_pairs() of pairs that carry values, ascending.
  const std::vector<std::size_t>& valued_pairs() const { return valued_; }

  std::optional<std::size_t> pair_index(const ActSlot& pair) const;
  std::optional<std::size_t> act_index(const std::string& act) const;
  std::optional<std::size_t> slot_index(const std::string& slot) const;
  std::optional<std::size_t> value_index(const ActSlot& pair, const std::string& value) const;
  bool is_no_value(const ActSlot& pair) const { return no_value_.count(pair) > 0; }

  // Triplets (act, slot, value) observed, i.e. the "seen" set.
  std::set<Triplet> triplets() const;

  std::string to_json() const;
  static Ontology from_json(const std::string& text);
  void save(const std::string& path) const;
  static Ontology load(const std::string& path);

  bool operator==(const Ontology& other) const;

 private:
  void reindex();

  std::vector<std::string> acts_;
  std::vector<std::string> slots_;
  std::vector<ActSlot> pairs_;
  std::set<ActSlot> no_value_;
  std::map<ActSlot, std::vector<std::string>> values_;
  NameSplitMap split_map_;

  std::map<ActSlot, std::size_t> pair_index_;
  std::map<std::string, std::size_t> act_index_;
  std::map<std::string, std::size_t> slot_index_;
  std::vector<std::size_t> valued_;
};

}  // namespace wcnslu
