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

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wcnslu {

// Token inventory with fixed special IDs. Continuation pieces carry a "##"
// prefix; first pieces do not.
class Vocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::size_t kCls = 2;
  static constexpr std::size_t kSep = 3;
  static constexpr std::size_t kEos = 4;
  static constexpr std::size_t kNumSpecials = 5;
  static const std::array<std::string, kNumSpecials>& special_tokens();

  Vocab();
  // Validates uniqueness and that the specials occupy IDs 0..4.
  static Vocab from_tokens(std::vector<std::string> tokens);
  static Vocab load(const std::string& path);
  void save(const std::string& path) const;

  std::size_t size() const { return tokens_.size(); }
  std::optional<std::size_t> id(std::string_view token) const;
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Greedy longest-match from the left over the lower-cased word. Falls back
  // to a single [UNK] when some position cannot be matched.
  std::vector<std::string> tokenize_word(std::string_view word) const;
  std::vector<std::size_t> encode_word(std::string_view word) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> id_of_;
};

// Deterministic vocabulary from word counts: specials, every character seen
// (bare and "##"-prefixed), then whole words by descending frequency, then
// "##" suffix pieces, up to max_size. Ties break lexicographically. Counts
// are taken over lower-cased words.
Vocab build_vocab(const std::map<std::string, std::size_t>& word_counts, std::size_t max_size,
                  std::size_t min_freq = 1);

// Joins pieces: "##" pieces glue onto the previous piece, other pieces start a
// new space-separated word.
std::string detokenize(std::span<const std::string> pieces);

std::string to_lower(std::string_view s);
// Splits UTF-8 text into code-point substrings (invalid bytes pass through
// one at a time).
std::vector<std::string> utf8_chars(std::string_view s);

}  // namespace wcnslu
