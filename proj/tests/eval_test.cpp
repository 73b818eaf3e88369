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

#include "wcnslu/eval.hpp"

#include <gtest/gtest.h>

#include "support.hpp"
#include "wcnslu/error.hpp"

namespace wcnslu {
namespace {

SemanticFrame random_frame(Rng& rng) {
  static const std::vector<Triplet> pool = {
      {"inform", "food", "chinese"}, {"inform", "food", "thai"},   {"inform", "area", "north"},
      {"request", "phone", ""},      {"thankyou", "", ""},         {"inform", "pricerange", "cheap"},
      {"Inform", "Food", "Chinese"}, {"negate", "", ""},           {"request", "addr", ""}};
  SemanticFrame f;
  const std::size_t n = rng.below(4);
  for (std::size_t i = 0; i < n; ++i) f.insert(pool[rng.below(pool.size())]);
  return f;
}

TEST(Evaluate, PerfectPrediction) {
  const std::vector<SemanticFrame> g = {{{"inform", "food", "chinese"}}, {{"thankyou", "", ""}}};
  const auto r = evaluate(g, g);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.utterance_accuracy, 1.0);
}

TEST(Evaluate, WorkedExample) {
  const std::vector<SemanticFrame> gold = {
      {{"inform", "food", "chinese"}, {"inform", "pricerange", "expensive"}}};
  const std::vector<SemanticFrame> pred = {{{"inform", "food", "chinese"}, {"request", "phone", ""}}};
  const auto r = evaluate(pred, gold);
  EXPECT_EQ(r.counts.tp, 1u);
  EXPECT_EQ(r.counts.fp, 1u);
  EXPECT_EQ(r.counts.fn, 1u);
  EXPECT_EQ(r.precision, 0.5);
  EXPECT_EQ(r.recall, 0.5);
  EXPECT_EQ(r.f1, 0.5);
  EXPECT_EQ(r.utterance_accuracy, 0.0);
}

TEST(Evaluate, EmptyFramesCountAsCorrect) {
  const auto r = evaluate({SemanticFrame{}}, {SemanticFrame{}});
  EXPECT_EQ(r.utterance_accuracy, 1.0);
  EXPECT_EQ(r.counts.tp + r.counts.fp + r.counts.fn, 0u);
  EXPECT_EQ(r.f1, 0.0);
}

TEST(Evaluate, CaseAndWhitespaceInsensitive) {
  const auto r = evaluate({{{" Inform", "FOOD ", "Chinese"}}}, {{{"inform", "food", "chinese"}}});
  EXPECT_EQ(r.counts.tp, 1u);
}

TEST(Evaluate, LengthMismatch) {
  try {
    evaluate({SemanticFrame{}}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(Evaluate, MatchesBruteForceOracle) {
  Rng rng(1);
  std::vector<SemanticFrame> preds, golds;
  for (int i = 0; i < 500; ++i) {
    preds.push_back(random_frame(rng));
    golds.push_back(random_frame(rng));
  }
  const auto r = evaluate(preds, golds);
  const auto b = testing::brute_force_counts(preds, golds);
  EXPECT_EQ(r.counts.tp, b.tp);
  EXPECT_EQ(r.counts.fp, b.fp);
  EXPECT_EQ(r.counts.fn, b.fn);
  EXPECT_EQ(r.utterance_accuracy, static_cast<double>(b.exact) / 500.0);
}

TEST(Evaluate, PermutationInvariant) {
  Rng rng(2);
  std::vector<SemanticFrame> preds, golds;
  for (int i = 0; i < 100; ++i) {
    preds.push_back(random_frame(rng));
    golds.push_back(random_frame(rng));
  }
  std::vector<std::size_t> order(100);
  for (std::size_t i = 0; i < 100; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<SemanticFrame> p2, g2;
  for (std::size_t i : order) {
    p2.push_back(preds[i]);
    g2.push_back(golds[i]);
  }
  const auto a = evaluate(preds, golds), b = evaluate(p2, g2);
  EXPECT_EQ(a.f1, b.f1);
  EXPECT_EQ(a.utterance_accuracy, b.utterance_accuracy);
}

TEST(Evaluate, AddingCorrectPredictionNeverHurts) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SemanticFrame> preds, golds;
    for (int i = 0; i < 5; ++i) {
      preds.push_back(random_frame(rng));
      golds.push_back(random_frame(rng));
    }
    const auto before = evaluate(preds, golds);
    const std::size_t i = rng.below(5);
    if (golds[i].empty()) continue;
    auto it = golds[i].triplets.begin();
    std::advance(it, rng.below(golds[i].size()));
    preds[i].insert(*it);
    const auto after = evaluate(preds, golds);
    EXPECT_GE(after.precision, before.precision);
    EXPECT_GE(after.recall, before.recall);
    EXPECT_GE(after.f1, before.f1);
  }
}

TEST(SeenUnseen, AllSeenGivesEmptyUnseenPartition) {
  const std::vector<SemanticFrame> gold = {{{"inform", "food", "chinese"}}};
  const auto r = seen_unseen_report(gold, gold, {{"inform", "food", "chinese"}});
  EXPECT_TRUE(r.unseen.empty);
  EXPECT_EQ(r.unseen.gold, 0u);
  EXPECT_EQ(r.unseen.recall, 0.0);
  EXPECT_EQ(r.seen.recall, 1.0);
}

TEST(SeenUnseen, UnseenHitGivesFullRecall) {
  const std::vector<SemanticFrame> gold = {{{"inform", "food", "thai"}}};
  const auto r = seen_unseen_report(gold, gold, {{"inform", "food", "chinese"}});
  EXPECT_FALSE(r.unseen.empty);
  EXPECT_EQ(r.unseen.recall, 1.0);
}

TEST(SeenUnseen, FalsePositivesGoToTheirPartition) {
  const std::vector<SemanticFrame> gold = {{{"inform", "food", "chinese"}}};
  const std::vector<SemanticFrame> pred = {{{"inform", "food", "thai"}}};
  const auto r = seen_unseen_report(pred, gold, {{"inform", "food", "chinese"}});
  EXPECT_EQ(r.seen.counts.fn, 1u);
  EXPECT_EQ(r.seen.counts.fp, 0u);
  EXPECT_EQ(r.unseen.counts.fp, 1u);
}

TEST(SeenUnseen, PartitionsRecombineToTotals) {
  Rng rng(4);
  const std::set<Triplet> train = {{"inform", "food", "chinese"}, {"request", "phone", ""},
                                   {"thankyou", "", ""}};
  std::vector<SemanticFrame> preds, golds;
  for (int i = 0; i < 300; ++i) {
    preds.push_back(random_frame(rng));
    golds.push_back(random_frame(rng));
  }
  const auto all = evaluate(preds, golds);
  const auto r = seen_unseen_report(preds, golds, train);
  EXPECT_EQ(r.seen.counts.tp + r.unseen.counts.tp, all.counts.tp);
  EXPECT_EQ(r.seen.counts.fn + r.unseen.counts.fn, all.counts.fn);
  EXPECT_EQ(r.seen.counts.fp + r.unseen.counts.fp, all.counts.fp);
  EXPECT_EQ(r.seen.gold + r.unseen.gold, all.counts.tp + all.counts.fn);
}

}  // namespace
}  // namespace wcnslu
