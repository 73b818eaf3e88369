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

#include "wcnslu/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wcnslu/error.hpp"

namespace wcnslu {

using nlohmann::json;

Ontology::Ontology(const std::map<ActSlot, std::set<std::string>>& observed,
                   NameSplitMap split_map)
    : split_map_(std::move(split_map)) {
  std::set<std::string> acts, slots;
  for (const auto& [pair, values] : observed) {
    acts.insert(pair.first);
    if (!pair.second.empty()) slots.insert(pair.second);
    pairs_.push_back(pair);
    if (values.empty()) {
      no_value_.insert(pair);
    } else {
      values_[pair] = std::vector<std::string>(values.begin(), values.end());
    }
  }
  acts_.assign(acts.begin(), acts.end());
  slots_.assign(slots.begin(), slots.end());
  reindex();
}

void Ontology::reindex() {
  std::sort(pairs_.begin(), pairs_.end());
  pair_index_.clear();
  act_index_.clear();
  slot_index_.clear();
  valued_.clear();
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    pair_index_[pairs_[i]] = i;
    if (!no_value_.count(pairs_[i])) valued_.push_back(i);
  }
  for (std::size_t i = 0; i < acts_.size(); ++i) act_index_[acts_[i]] = i;
  for (std::size_t i = 0; i < slots_.size(); ++i) slot_index_[slots_[i]] = i;
}

const std::vector<std::string>& Ontology::values_of(const ActSlot& pair) const {
  static const std::vector<std::string> kNone;
  auto it = values_.find(pair);
  return it == values_.end() ? kNone : it->second;
}

std::optional<std::size_t> Ontology::pair_index(const ActSlot& pair) const {
  auto it = pair_index_.find(pair);
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Ontology::act_index(const std::string& act) const {
  auto it = act_index_.find(act);
  if (it == act_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Ontology::slot_index(const std::string& slot) const {
  auto it = slot_index_.find(slot);
  if (it == slot_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Ontology::value_index(const ActSlot& pair, const std::string& value) const {
  const auto& values = values_of(pair);
  auto it = std::lower_bound(values.begin(), values.end(), value);
  if (it == values.end() || *it != value) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

std::set<Triplet> Ontology::triplets() const {
  std::set<Triplet> out;
  for (const auto& pair : pairs_) {
    if (no_value_.count(pair)) {
      out.insert({pair.first, pair.second, ""});
    } else {
      for (const auto& v : values_of(pair)) out.insert({pair.first, pair.second, v});
    }
  }
  return out;
}

std::string Ontology::to_json() const {
  json j;
  j["acts"] = acts_;
  j["slots"] = slots_;
  json values = json::array();
  for (const auto& [pair, vals] : values_) {
    values.push_back({{"act", pair.first}, {"slot", pair.second}, {"values", vals}});
  }
  j["values"] = values;
  json pairs = json::array();
  for (const auto& p : pairs_) pairs.push_back({p.first, p.second});
  j["act_slot_pairs"] = pairs;
  json nv = json::array();
  for (const auto& p : no_value_) nv.push_back({p.first, p.second});
  j["no_value_pairs"] = nv;
  json split = json::object();
  for (const auto& [k, v] : split_map_) split[k] = v;
  j["name_split_map"] = split;
  return j.dump(2) + "\n";
}

Ontology Ontology::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Ontology o;
    o.acts_ = j.at("acts").get<std::vector<std::string>>();
    o.slots_ = j.at("slots").get<std::vector<std::string>>();
    for (const auto& p : j.at("act_slot_pairs")) {
      o.pairs_.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
    for (const auto& p : j.at("no_value_pairs")) {
      o.no_value_.emplace(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
    for (const auto& v : j.at("values")) {
      ActSlot pair{v.at("act").get<std::string>(), v.at("slot").get<std::string>()};
      auto vals = v.at("values").get<std::vector<std::string>>();
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      o.values_[pair] = std::move(vals);
    }
    for (const auto& [k, v] : j.at("name_split_map").items()) {
      o.split_map_[k] = v.get<std::vector<std::string>>();
    }
    std::sort(o.acts_.begin(), o.acts_.end());
    std::sort(o.slots_.begin(), o.slots_.end());
    for (const auto& p : o.pairs_) {
      if (!o.no_value_.count(p) && !o.values_.count(p)) {
        throw Error(ErrorCode::kParse, "pair " + p.first + "-" + p.second + " has neither values nor a no-value entry");
      }
    }
    o.reindex();
    return o;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("ontology: ") + e.what());
  }
}

void Ontology::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write ontology " + path);
  out << to_json();
}

Ontology Ontology::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open ontology " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

bool Ontology::operator==(const Ontology& other) const {
  return acts_ == other.acts_ && slots_ == other.slots_ && pairs_ == other.pairs_ &&
         no_value_ == other.no_value_ && values_ == other.values_ &&
         split_map_ == other.split_map_;
}

}  // namespace wcnslu
