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

#include <compare>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

namespace wcnslu {

// act(slot=value); slot and value may be empty.
struct Triplet {
  std::string act;
  std::string slot;
  std::string value;

  auto operator<=>(const Triplet&) const = default;
  bool operator==(const Triplet&) const = default;

  std::string to_string() const;
};

// Lower-cased, whitespace-trimmed copy used for scoring.
Triplet normalize(const Triplet& t);

// A set of triplets: the type of both gold labels and predictions.
struct SemanticFrame {
  std::set<Triplet> triplets;

  SemanticFrame() = default;
  SemanticFrame(std::initializer_list<Triplet> items) : triplets(items) {}

  void insert(Triplet t) { triplets.insert(std::move(t)); }
  bool contains(const Triplet& t) const { return triplets.count(t) > 0; }
  std::size_t size() const { return triplets.size(); }
  bool empty() const { return triplets.empty(); }

  bool operator==(const SemanticFrame&) const = default;
};

SemanticFrame normalize(const SemanticFrame& f);

}  // namespace wcnslu
