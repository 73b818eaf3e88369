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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wcnslu/error.hpp"

namespace wcnslu {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(BuildVocab, MinimalClosure) {
  const Vocab v = build_vocab({{"a", 5}}, 20);
  for (const auto& s : Vocab::special_tokens()) EXPECT_TRUE(v.id(s).has_value()) << s;
  EXPECT_TRUE(v.id("a").has_value());
  EXPECT_TRUE(v.id("##a").has_value());
  EXPECT_EQ(*v.id("[PAD]"), 0u);
}

TEST(BuildVocab, AsciiCorpusHasNoUnknowns) {
  std::map<std::string, std::size_t> corpus = {
      {"restaurant", 3}, {"cheap", 9}, {"north", 2}, {"zebra", 1}, {"quixotic", 1}};
  const Vocab v = build_vocab(corpus, 40);
  for (const auto& [w, n] : corpus) {
    for (const auto& piece : v.tokenize_word(w)) EXPECT_NE(piece, "[UNK]") << w;
  }
}

TEST(BuildVocab, DeterministicFiles) {
  std::map<std::string, std::size_t> corpus = {{"cheap", 4}, {"chinese", 4}, {"north", 2},
                                               {"south", 2}, {"want", 7}};
  const std::string dir = testing::temp_dir("vocab_det");
  build_vocab(corpus, 60).save(dir + "/a.txt");
  build_vocab(corpus, 60).save(dir + "/b.txt");
  EXPECT_EQ(read_file(dir + "/a.txt"), read_file(dir + "/b.txt"));
}

TEST(BuildVocab, EmptyCorpusThrows) {
  try {
    build_vocab({}, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorpusEmpty);
  }
}

TEST(BuildVocab, RespectsMaxSize) {
  std::map<std::string, std::size_t> corpus;
  for (int i = 0; i < 200; ++i) corpus["word" + std::to_string(i)] = 1 + i % 5;
  const Vocab v = build_vocab(corpus, 60);
  EXPECT_LE(v.size(), 60u);
}

TEST(Tokenize, GreedyLongestMatch) {
  const Vocab v = Vocab::from_tokens({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[EOS]", "play", "##ing",
                                      "p", "##l", "##a", "##y", "##i", "##n", "##g"});
  EXPECT_EQ(v.tokenize_word("playing"), (std::vector<std::string>{"play", "##ing"}));
}

TEST(Tokenize, WholeWordWins) {
  const Vocab v = Vocab::from_tokens(
      {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[EOS]", "play", "##ing", "playing"});
  EXPECT_EQ(v.tokenize_word("playing"), (std::vector<std::string>{"playing"}));
}

TEST(Tokenize, UnknownCharacterFallsBack) {
  const Vocab v = build_vocab({{"abc", 1}}, 40);
  EXPECT_EQ(v.tokenize_word("abz"), (std::vector<std::string>{"[UNK]"}));
}

TEST(Tokenize, LowerCases) {
  const Vocab v = build_vocab({{"cheap", 3}}, 40);
  EXPECT_EQ(v.tokenize_word("CHEAP"), v.tokenize_word("cheap"));
}

TEST(Tokenize, RoundTripAndPieceShape) {
  std::map<std::string, std::size_t> corpus = {{"cheap", 4}, {"chinese", 4}, {"restaurant", 2},
                                               {"expensive", 1}, {"moderately", 1}};
  const Vocab v = build_vocab(corpus, 45);
  Rng rng(3);
  const std::string alphabet = "cheapinsrtuxvmodly";
  for (int trial = 0; trial < 300; ++trial) {
    std::string word;
    const std::size_t len = 1 + rng.below(12);
    for (std::size_t i = 0; i < len; ++i) word += alphabet[rng.below(alphabet.size())];
    const auto pieces = v.tokenize_word(word);
    ASSERT_FALSE(pieces.empty());
    EXPECT_EQ(detokenize(pieces), word);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      EXPECT_FALSE(pieces[i].empty());
      EXPECT_EQ(pieces[i].rfind("##", 0) == 0, i > 0) << word;
    }
    EXPECT_EQ(v.tokenize_word(word), pieces);
  }
}

TEST(VocabFile, ReloadIsBitExact) {
  const Vocab v = build_vocab({{"cheap", 4}, {"north", 2}}, 40);
  const std::string dir = testing::temp_dir("vocab_io");
  v.save(dir + "/v.txt");
  const Vocab w = Vocab::load(dir + "/v.txt");
  EXPECT_EQ(v.tokens(), w.tokens());
  w.save(dir + "/w.txt");
  EXPECT_EQ(read_file(dir + "/v.txt"), read_file(dir + "/w.txt"));
}

}  // namespace
}  // namespace wcnslu
