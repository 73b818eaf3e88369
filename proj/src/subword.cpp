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

#include "wcnslu/subword.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "wcnslu/error.hpp"

namespace wcnslu {
namespace {

constexpr std::size_t kMaxCharsPerWord = 100;

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

const std::array<std::string, Vocab::kNumSpecials>& Vocab::special_tokens() {
  static const std::array<std::string, kNumSpecials> kTokens = {"[PAD]", "[UNK]", "[CLS]",
                                                                "[SEP]", "[EOS]"};
  return kTokens;
}

Vocab::Vocab() {
  for (const auto& s : special_tokens()) {
    id_of_.emplace(s, tokens_.size());
    tokens_.push_back(s);
  }
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  const auto& specials = special_tokens();
  if (tokens.size() < kNumSpecials) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary is missing special tokens");
  }
  for (std::size_t i = 0; i < kNumSpecials; ++i) {
    if (tokens[i] != specials[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vocabulary id " + std::to_string(i) + " must be " + specials[i]);
    }
  }
  Vocab v;
  v.tokens_.clear();
  v.id_of_.clear();
  for (auto& t : tokens) {
    if (t.empty()) throw Error(ErrorCode::kInvalidArgument, "empty vocabulary token");
    if (!v.id_of_.emplace(t, v.tokens_.size()).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate vocabulary token " + t);
    }
    v.tokens_.push_back(std::move(t));
  }
  return v;
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open vocabulary " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  return from_tokens(std::move(tokens));
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write vocabulary " + path);
  for (const auto& t : tokens_) out << t << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

std::optional<std::size_t> Vocab::id(std::string_view token) const {
  auto it = id_of_.find(std::string(token));
  if (it == id_of_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Vocab::tokenize_word(std::string_view word) const {
  const std::vector<std::string> chars = utf8_chars(to_lower(word));
  if (chars.empty()) return {};
  if (chars.size() > kMaxCharsPerWord) return {special_tokens()[kUnk]};
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < chars.size()) {
    std::size_t end = chars.size();
    std::string match;
    while (start < end) {
      std::string candidate = start > 0 ? "##" : "";
      for (std::size_t i = start; i < end; ++i) candidate += chars[i];
      if (id_of_.count(candidate)) {
        match = std::move(candidate);
        break;
      }
      --end;
    }
    if (match.empty()) return {special_tokens()[kUnk]};
    pieces.push_back(std::move(match));
    start = end;
  }
  return pieces;
}

std::vector<std::size_t> Vocab::encode_word(std::string_view word) const {
  std::vector<std::size_t> ids;
  for (const auto& piece : tokenize_word(word)) ids.push_back(id_of_.at(piece));
  return ids;
}

Vocab build_vocab(const std::map<std::string, std::size_t>& word_counts, std::size_t max_size,
                  std::size_t min_freq) {
  std::map<std::string, std::size_t> counts;
  for (const auto& [w, c] : word_counts) {
    if (w.empty() || c == 0) continue;
    counts[to_lower(w)] += c;
  }
  if (counts.empty()) throw Error(ErrorCode::kCorpusEmpty, "cannot build a vocabulary from an empty corpus");

  std::set<std::string> alphabet;
  for (const auto& [w, c] : counts) {
    for (auto& ch : utf8_chars(w)) alphabet.insert(ch);
  }
  const std::size_t minimal = Vocab::kNumSpecials + 2 * alphabet.size();
  if (max_size <= minimal) {
    throw Error(ErrorCode::kInvalidArgument,
                "max vocabulary size " + std::to_string(max_size) + " must exceed " +
                    std::to_string(minimal) + " (specials plus alphabet)");
  }

  std::vector<std::string> tokens(Vocab::special_tokens().begin(), Vocab::special_tokens().end());
  std::set<std::string> present(tokens.begin(), tokens.end());
  auto push = [&](const std::string& t) {
    if (tokens.size() >= max_size) return false;
    if (present.insert(t).second) tokens.push_back(t);
    return true;
  };
  for (const auto& ch : alphabet) {
    push(ch);
    push("##" + ch);
  }

  auto ranked = [&](const std::map<std::string, std::size_t>& m) {
    std::vector<std::pair<std::string, std::size_t>> v;
    for (const auto& [t, c] : m) {
      if (c >= min_freq) v.emplace_back(t, c);
    }
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return v;
  };

  for (const auto& [w, c] : ranked(counts)) {
    if (!push(w)) break;
  }

  std::map<std::string, std::size_t> suffixes;
  for (const auto& [w, c] : counts) {
    const auto chars = utf8_chars(w);
    for (std::size_t start = 1; start + 1 < chars.size(); ++start) {
      std::string piece = "##";
      for (std::size_t i = start; i < chars.size(); ++i) piece += chars[i];
      suffixes[piece] += c;
    }
  }
  for (const auto& [p, c] : ranked(suffixes)) {
    if (!push(p)) break;
  }
  return Vocab::from_tokens(std::move(tokens));
}

std::string detokenize(std::span<const std::string> pieces) {
  std::string out;
  for (const auto& p : pieces) {
    if (p.rfind("##", 0) == 0) {
      out += p.substr(2);
    } else {
      if (!out.empty()) out += ' ';
      out += p;
    }
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = utf8_length(static_cast<unsigned char>(s[i]));
    if (i + len > s.size()) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace wcnslu
