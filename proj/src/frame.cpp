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

#include "wcnslu/frame.hpp"

#include "wcnslu/subword.hpp"

namespace wcnslu {
namespace {

std::string trim_lower(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return to_lower(s.substr(first, last - first + 1));
}

}  // namespace

std::string Triplet::to_string() const {
  std::string out = act + "(";
  if (!slot.empty()) {
    out += slot;
    if (!value.empty()) out += "=" + value;
  }
  return out + ")";
}

Triplet normalize(const Triplet& t) {
  return Triplet{trim_lower(t.act), trim_lower(t.slot), trim_lower(t.value)};
}

SemanticFrame normalize(const SemanticFrame& f) {
  SemanticFrame out;
  for (const auto& t : f.triplets) out.insert(normalize(t));
  return out;
}

}  // namespace wcnslu
