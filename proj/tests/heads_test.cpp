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

#include "wcnslu/heads.hpp"

#include <gtest/gtest.h>

#include <set>

#include "wcnslu/error.hpp"
#include "wcnslu/oracle_suite.hpp"
#include "wcnslu/ops.hpp"

namespace wcnslu {
namespace {

// Toy ontology: acts {inform, request, thankyou}; slots {area, food, phone};
// valued pairs (inform, area) and (inform, food); no-value pairs
// (request, phone) and (thankyou, "").

TEST(Ontology, ToyLayout) {
  const auto toy = make_toy_setup(HeadType::kStc, 1);
  const Ontology& ont = toy.model->ontology();
  EXPECT_EQ(ont.acts(), (std::vector<std::string>{"inform", "request", "thankyou"}));
  EXPECT_EQ(ont.act_slot_pairs().size(), 4u);
  EXPECT_EQ(ont.valued_pairs().size(), 2u);
  EXPECT_TRUE(ont.is_no_value({"request", "phone"}));
  EXPECT_EQ(ont.values_of({"inform", "food"}), (std::vector<std::string>{"chinese", "indian"}));
}

TEST(Stc, ZeroParamsGiveHalfProbability) {
  auto toy = make_toy_setup(HeadType::kStc, 1);
  SluModel& m = *toy.model;
  m.params()[m.stc().exist_w].value.fill(0.0);
  m.params()[m.stc().exist_b].value.fill(0.0);
  Graph g;
  const auto fwd = m.forward(g, toy.input);
  const auto logits = stc_forward(g, m.params(), m.stc(), fwd.r, m.ontology());
  ASSERT_EQ(logits.existence.cols(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(logits.existence.value()[i], 0.0);
  EXPECT_TRUE(stc_decode(StcScores::from(logits), m.ontology()).empty());
}

TEST(Stc, OutputArity) {
  auto toy = make_toy_setup(HeadType::kStc, 2);
  SluModel& m = *toy.model;
  Graph g;
  const auto logits = stc_forward(g, m.params(), m.stc(), m.forward(g, toy.input).r, m.ontology());
  ASSERT_EQ(logits.values.size(), 2u);
  EXPECT_EQ(logits.values[0].cols(), 1u);
  EXPECT_EQ(logits.values[1].cols(), 2u);
  EXPECT_THROW(stc_forward(g, m.params(), m.stc(), g.constant(Tensor(1, 5)), m.ontology()), Error);
}

StcScores scores(const Ontology& ont, std::vector<double> existence,
                 std::vector<double> food_values) {
  StcScores s;
  s.existence = Tensor::row(std::move(existence));
  s.values = {Tensor::row({0.0}), Tensor::row(std::move(food_values))};
  EXPECT_EQ(ont.act_slot_pairs()[ont.valued_pairs()[1]], (ActSlot{"inform", "food"}));
  return s;
}

TEST(Stc, DecodeRule) {
  const auto toy = make_toy_setup(HeadType::kStc, 1);
  const Ontology& ont = toy.model->ontology();
  const std::size_t food = *ont.pair_index({"inform", "food"});
  std::vector<double> ex(4, -5.0);
  ex[food] = 3.0;
  EXPECT_EQ(stc_decode(scores(ont, ex, {2.0, -1.0}), ont),
            (SemanticFrame{{"inform", "food", "chinese"}}));
  EXPECT_EQ(stc_decode(scores(ont, ex, {0.4, 0.4}), ont),
            (SemanticFrame{{"inform", "food", "chinese"}}));
  EXPECT_EQ(stc_decode(scores(ont, ex, {-1.0, 0.4}), ont),
            (SemanticFrame{{"inform", "food", "indian"}}));
}

TEST(Stc, NoValuePairsEmitEmptyValue) {
  const auto toy = make_toy_setup(HeadType::kStc, 1);
  const Ontology& ont = toy.model->ontology();
  std::vector<double> ex(4, -5.0);
  ex[*ont.pair_index({"request", "phone"})] = 1.0;
  ex[*ont.pair_index({"thankyou", ""})] = 1.0;
  EXPECT_EQ(stc_decode(scores(ont, ex, {1.0, 0.0}), ont),
            (SemanticFrame{{"request", "phone", ""}, {"thankyou", "", ""}}));
}

TEST(Stc, DecodeInvariantToPositiveValueScaling) {
  auto toy = make_toy_setup(HeadType::kStc, 3);
  SluModel& m = *toy.model;
  m.params()[m.stc().exist_b].value.fill(4.0);
  Graph g;
  StcScores s =
      StcScores::from(stc_forward(g, m.params(), m.stc(), m.forward(g, toy.input).r, m.ontology()));
  const SemanticFrame base = stc_decode(s, m.ontology());
  EXPECT_FALSE(base.empty());
  for (double c : {0.01, 0.5, 7.0, 1e3}) {
    StcScores t = s;
    for (auto& v : t.values)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= c;
    EXPECT_EQ(stc_decode(t, m.ontology()), base);
  }
}

TEST(Stc, LossIgnoresTripletsOutsideOntology) {
  auto toy = make_toy_setup(HeadType::kStc, 4);
  SluModel& m = *toy.model;
  Graph g;
  const auto logits = stc_forward(g, m.params(), m.stc(), m.forward(g, toy.input).r, m.ontology());
  const double a = stc_loss(logits, SemanticFrame{{"inform", "food", "chinese"}}, m.ontology())
                       .value()[0];
  const double b = stc_loss(logits,
                            SemanticFrame{{"inform", "food", "chinese"}, {"inform", "food", "thai"}},
                            m.ontology())
                       .value()[0];
  EXPECT_DOUBLE_EQ(a, b);
}

struct HdFixture {
  ToySetup toy = make_toy_setup(HeadType::kHd, 5);
  SluModel& m = *toy.model;
  const HdParams& hd = m.hd();
};

TEST(Hd, TiedProjectionSharesStorage) {
  HdFixture f;
  EXPECT_EQ(f.hd.token_embedding, f.m.encoder().embeddings.token);
  Graph g;
  const auto fwd = f.m.forward(g, f.toy.input);
  const Var start = decoder_start(g, f.m.params(), f.hd, fwd.r,
                                  g.constant(Tensor(1, 16, 0.1)), g.constant(Tensor(1, 16, 0.2)));
  const std::vector<std::size_t> prefix;
  const Tensor before =
      run_decoder(g, f.m.params(), f.hd, start, prefix, fwd.o, f.toy.input.token_ids).vocab_probs.value();
  const std::size_t tok = *f.m.vocab().id("cheap");
  Tensor& table = f.m.params()[f.m.encoder().embeddings.token].value;
  for (std::size_t c = 0; c < table.cols(); ++c) table(tok, c) += 1.0;
  Graph g2;
  const Tensor after = run_decoder(g2, f.m.params(), f.hd, g2.constant(start.value()), prefix,
                                   g2.constant(fwd.o.value()), f.toy.input.token_ids)
                           .vocab_probs.value();
  EXPECT_NE(before(0, tok), after(0, tok));
}

TEST(Hd, SingleTokenNameFeatureIsEmbeddingRow) {
  HdFixture f;
  Graph g;
  const Tensor e = name_feature(g, f.m.params(), f.hd.token_embedding, f.m.vocab(),
                                f.m.ontology().name_split_map(), "inform")
                       .value();
  const Tensor& table = f.m.params()[f.hd.token_embedding].value;
  const std::size_t id = *f.m.vocab().id("inform");
  for (std::size_t c = 0; c < table.cols(); ++c) EXPECT_EQ(e[c], table(id, c));
}

TEST(Hd, MixtureRowsAreDistributions) {
  HdFixture f;
  for (std::optional<double> gate : {std::optional<double>{}, std::optional<double>{0.0},
                                     std::optional<double>{0.3}, std::optional<double>{1.0}}) {
    Graph g;
    const auto fwd = f.m.forward(g, f.toy.input);
    const Var start = decoder_start(g, f.m.params(), f.hd, fwd.r,
                                    g.constant(Tensor(1, 16, 0.1)), g.constant(Tensor(1, 16, -0.2)));
    const std::vector<std::size_t> prefix = {*f.m.vocab().id("cheap"), *f.m.vocab().id("food")};
    const auto out = run_decoder(g, f.m.params(), f.hd, start, prefix, fwd.o,
                                 f.toy.input.token_ids, gate);
    const Tensor& d = out.distribution.value();
    ASSERT_EQ(d.rows(), 3u);
    for (std::size_t r = 0; r < d.rows(); ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d.cols(); ++c) {
        EXPECT_GE(d(r, c), 0.0);
        s += d(r, c);
      }
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
    if (gate && *gate == 1.0) {
      EXPECT_LE(max_abs_diff(d, out.vocab_probs.value()), 1e-15);
    }
    if (gate && *gate == 0.0) {
      EXPECT_LE(max_abs_diff(d, out.copy_probs.value()), 1e-15);
      std::set<std::size_t> in(f.toy.input.token_ids.begin(), f.toy.input.token_ids.end());
      for (std::size_t r = 0; r < d.rows(); ++r)
        for (std::size_t c = 0; c < d.cols(); ++c)
          if (!in.count(c)) {
            EXPECT_EQ(d(r, c), 0.0);
          }
    }
  }
}

TEST(Hd, CopyOnlyGenerationEmitsInputTokens) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto toy = make_toy_setup(HeadType::kHd, seed);
    SluModel& m = *toy.model;
    Graph g;
    const auto fwd = m.forward(g, toy.input);
    const Var start = decoder_start(g, m.params(), m.hd(), fwd.r,
                                    g.constant(Tensor(1, 16, 0.3)), g.constant(Tensor(1, 16, 0.1)));
    GenerateOptions opts;
    opts.gate_override = 0.0;
    const auto pieces = value_generate(g, m.params(), m.hd(), start, fwd.o, toy.input.token_ids,
                                       m.vocab(), opts);
    EXPECT_FALSE(pieces.empty());
    const std::set<std::string> inputs(toy.input.tokens.begin(), toy.input.tokens.end());
    for (const auto& p : pieces) EXPECT_TRUE(inputs.count(p)) << p;
  }
}

TEST(Hd, LossWithEmptyGold) {
  HdFixture f;
  Graph g;
  const auto fwd = f.m.forward(g, f.toy.input);
  const auto loss = hd_loss(g, f.m.params(), f.hd, fwd.r, fwd.o, f.toy.input.token_ids, {},
                            f.m.ontology(), f.m.vocab());
  EXPECT_EQ(loss.value_terms, 0u);
  EXPECT_EQ(loss.slot.value()[0], 0.0);
  EXPECT_EQ(loss.value.value()[0], 0.0);
  // Act loss: BCE of every act against a negative target.
  const Tensor& r = fwd.r.value();
  const Tensor& w = f.m.params()[f.hd.act_w].value;
  const Tensor& b = f.m.params()[f.hd.act_b].value;
  double expected = 0.0;
  for (std::size_t a = 0; a < w.cols(); ++a) {
    double z = b[a];
    for (std::size_t k = 0; k < r.cols(); ++k) z += r[k] * w(k, a);
    expected += std::log1p(std::exp(z));
  }
  EXPECT_NEAR(loss.act.value()[0], expected, 1e-9);
}

TEST(Hd, LossWithNoValueTriplet) {
  HdFixture f;
  Graph g;
  const auto fwd = f.m.forward(g, f.toy.input);
  const auto loss = hd_loss(g, f.m.params(), f.hd, fwd.r, fwd.o, f.toy.input.token_ids,
                            {{"thankyou", "", ""}}, f.m.ontology(), f.m.vocab());
  EXPECT_EQ(loss.value_terms, 0u);
  EXPECT_GT(loss.slot.value()[0], 0.0);
}

TEST(Hd, ValueTargetEndsWithEos) {
  HdFixture f;
  Graph g;
  const auto fwd = f.m.forward(g, f.toy.input);
  const auto loss = hd_loss(g, f.m.params(), f.hd, fwd.r, fwd.o, f.toy.input.token_ids,
                            {{"inform", "food", "cheap"}}, f.m.ontology(), f.m.vocab());
  EXPECT_EQ(loss.value_terms, 2u);
}

TEST(Hd, UnknownActThrows) {
  HdFixture f;
  Graph g;
  const auto fwd = f.m.forward(g, f.toy.input);
  try {
    hd_loss(g, f.m.params(), f.hd, fwd.r, fwd.o, f.toy.input.token_ids, {{"bye", "", ""}},
            f.m.ontology(), f.m.vocab());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownActOrSlot);
  }
}

void force_classifiers(SluModel& m, std::vector<double> act_bias, std::vector<double> slot_bias) {
  m.params()[m.hd().act_w].value.fill(0.0);
  m.params()[m.hd().slot_w].value.fill(0.0);
  m.params()[m.hd().act_b].value = Tensor::row(std::move(act_bias));
  m.params()[m.hd().slot_b].value = Tensor::row(std::move(slot_bias));
}

TEST(Hd, DecodeWithoutActsIsEmpty) {
  HdFixture f;
  force_classifiers(f.m, {-9, -9, -9}, {9, 9, 9, 9});
  Graph g;
  EXPECT_TRUE(f.m.decode(g, f.toy.input).empty());
}

TEST(Hd, NoValuePairSkipsGeneration) {
  HdFixture f;
  // Slots are {area, food, phone, NONE}.
  force_classifiers(f.m, {-9, 9, -9}, {-9, -9, 9, -9});
  std::size_t calls = 0;
  HdDecodeOptions opts;
  opts.generate_calls = &calls;
  Graph g;
  const auto fwd = f.m.forward(g, f.toy.input);
  const auto frame = hd_decode(g, f.m.params(), f.hd, fwd.r, fwd.o, f.toy.input.token_ids,
                               f.m.ontology(), f.m.vocab(), opts);
  EXPECT_EQ(frame, (SemanticFrame{{"request", "phone", ""}}));
  EXPECT_EQ(calls, 0u);

  force_classifiers(f.m, {9, -9, -9}, {-9, 9, -9, -9});
  Graph g2;
  const auto fwd2 = f.m.forward(g2, f.toy.input);
  const auto frame2 = hd_decode(g2, f.m.params(), f.hd, fwd2.r, fwd2.o, f.toy.input.token_ids,
                                f.m.ontology(), f.m.vocab(), opts);
  EXPECT_EQ(calls, 1u);
  ASSERT_EQ(frame2.size(), 1u);
  EXPECT_EQ(frame2.triplets.begin()->act, "inform");
  EXPECT_EQ(frame2.triplets.begin()->slot, "food");
}

TEST(Hd, NoneSlotYieldsSlotlessTriplet) {
  HdFixture f;
  force_classifiers(f.m, {-9, -9, 9}, {-9, -9, -9, 9});
  Graph g;
  EXPECT_EQ(f.m.decode(g, f.toy.input), (SemanticFrame{{"thankyou", "", ""}}));
}

TEST(Hd, DecodeIsDeterministic) {
  HdFixture f;
  force_classifiers(f.m, {9, 9, -9}, {9, 9, 9, -9});
  Graph a, b;
  const auto fa = f.m.decode(a, f.toy.input);
  EXPECT_EQ(fa, f.m.decode(b, f.toy.input));
  EXPECT_FALSE(fa.empty());
}

}  // namespace
}  // namespace wcnslu
