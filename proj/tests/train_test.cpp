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

#include "wcnslu/train.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wcnslu/checkpoint.hpp"
#include "wcnslu/eval.hpp"
#include "wcnslu/error.hpp"
#include "wcnslu/synth.hpp"

namespace wcnslu {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SynthSplits small_splits(std::size_t n, std::uint64_t seed = 1) {
  SynthConfig cfg;
  cfg.n_train = n;
  cfg.n_valid = std::max<std::size_t>(4, n / 4);
  cfg.n_test = 4;
  cfg.seed = seed;
  return generate_synthetic(cfg);
}

TrainConfig small_config(HeadType head = HeadType::kStc) {
  TrainConfig c;
  c.model.head = head;
  c.model.layers = 1;
  c.model.d_model = 16;
  c.model.heads = 2;
  c.model.d_ff = 32;
  c.model.max_value_len = 4;
  c.epochs = 1;
  c.batch_size = 4;
  c.seed = 7;
  return c;
}

Vocab vocab_for(const SynthSplits& s) {
  return build_vocab_from({&s.train, &s.valid, &s.test}, default_name_split_map(), 400);
}

TEST(Train, OneEpochSmokeGivesLoadableCheckpoint) {
  for (HeadType head : {HeadType::kStc, HeadType::kHd}) {
    const auto s = small_splits(8);
    const Vocab vocab = vocab_for(s);
    const std::string dir = testing::temp_dir(std::string("smoke_") + head_name(head));
    auto result = train(small_config(head), s.train, s.valid, vocab, dir + "/log.jsonl");
    ASSERT_TRUE(result.model);
    ASSERT_EQ(result.log.size(), 1u);
    save_checkpoint(*result.model, {result.best_valid_f1, {}}, dir + "/ckpt");
    const auto loaded = load_checkpoint(dir + "/ckpt");
    EXPECT_EQ(loaded.info.best_valid_f1, result.best_valid_f1);
    EXPECT_EQ(loaded.model->ontology(), result.model->ontology());
    std::ifstream log(dir + "/log.jsonl");
    std::string line;
    ASSERT_TRUE(std::getline(log, line));
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"epoch", "train_loss", "valid_f1", "valid_acc", "lr"})
      EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Train, SameSeedGivesIdenticalCheckpointBytes) {
  const auto s = small_splits(24);
  const Vocab vocab = vocab_for(s);
  auto cfg = small_config();
  cfg.epochs = 2;
  const std::string dir = testing::temp_dir("det");
  for (const char* name : {"a", "b"}) {
    auto r = train(cfg, s.train, s.valid, vocab);
    nlohmann::json tc;
    to_json(tc, cfg);
    save_checkpoint(*r.model, {r.best_valid_f1, tc}, dir + "/" + name);
  }
  for (const char* f : {"manifest.json", "params.bin", "vocab.txt", "ontology.json"})
    EXPECT_EQ(read_file(dir + "/a/" + f), read_file(dir + "/b/" + f)) << f;
}

TEST(Train, ThreadCountDoesNotChangeResult) {
  const auto s = small_splits(16, 2);
  const Vocab vocab = vocab_for(s);
  auto cfg = small_config(HeadType::kHd);
  auto a = train(cfg, s.train, s.valid, vocab);
  cfg.threads = 3;
  auto b = train(cfg, s.train, s.valid, vocab);
  ASSERT_EQ(a.model->params().size(), b.model->params().size());
  for (std::size_t i = 0; i < a.model->params().size(); ++i)
    EXPECT_EQ(a.model->params()[i].value, b.model->params()[i].value) << a.model->params()[i].name;
}

TEST(Train, OverfitsOneRepeatedExample) {
  for (HeadType head : {HeadType::kStc, HeadType::kHd}) {
    const auto s = small_splits(8, 3);
    const Vocab vocab = vocab_for(s);
    TrainConfig cfg = small_config(head);
    cfg.model.d_model = 32;
    cfg.model.dropout_encoder = 0.0;
    cfg.model.dropout_head = 0.0;
    cfg.model.dropout_decoder = 0.0;
    cfg.base_lr = 1e-3;
    cfg.warmup = 0.0;
    cfg.linear_decay = false;
    SluModel model(cfg.model, vocab, build_ontology(s.train, default_name_split_map()), 1);
    const auto prepared = prepare_examples(model, s.train);
    ASSERT_FALSE(prepared.empty());
    Optimizer opt(model, cfg, 20);
    const std::vector<const PreparedExample*> batch(4, &prepared[0]);
    std::vector<double> losses;
    for (int step = 0; step < 21; ++step) losses.push_back(opt.step(batch));
    for (std::size_t i = 1; i < losses.size(); ++i)
      EXPECT_LT(losses[i], losses[i - 1]) << head_name(head) << " step " << i;
  }
}

TEST(Train, BestEpochIsMaxOfLog) {
  const auto s = small_splits(40, 4);
  const Vocab vocab = vocab_for(s);
  auto cfg = small_config();
  cfg.epochs = 4;
  std::size_t callbacks = 0;
  auto r = train(cfg, s.train, s.valid, vocab, "", [&](const EpochLog&) { ++callbacks; });
  EXPECT_EQ(callbacks, 4u);
  double best = -1.0;
  std::size_t best_epoch = 0;
  for (const auto& e : r.log) {
    if (e.valid_f1 > best) {
      best = e.valid_f1;
      best_epoch = e.epoch;
    }
  }
  EXPECT_EQ(r.best_valid_f1, best);
  EXPECT_EQ(r.best_epoch, best_epoch);
  const auto preds = predict_all(*r.model, s.valid);
  std::vector<SemanticFrame> golds;
  for (const auto& ex : s.valid) golds.push_back(ex.labels);
  EXPECT_EQ(evaluate(preds, golds).f1, best);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  const auto s = small_splits(16, 5);
  const Vocab vocab = vocab_for(s);
  for (HeadType head : {HeadType::kStc, HeadType::kHd}) {
    auto cfg = small_config(head);
    cfg.model.cls_only = head == HeadType::kHd;
    auto r = train(cfg, s.train, s.valid, vocab);
    const std::string dir = testing::temp_dir(std::string("ckpt_") + head_name(head));
    save_checkpoint(*r.model, {0.25, {{"note", "x"}}}, dir);
    const auto loaded = load_checkpoint(dir);
    EXPECT_EQ(loaded.info.train_config["note"], "x");
    for (std::size_t i = 0; i < 10; ++i) {
      const auto& ex = s.train[i];
      EXPECT_EQ(r.model->representation(ex.wcn, ex.system_act),
                loaded.model->representation(ex.wcn, ex.system_act));
      EXPECT_EQ(r.model->predict(ex.wcn, ex.system_act),
                loaded.model->predict(ex.wcn, ex.system_act));
    }
  }
}

TEST(Checkpoint, TruncatedPayloadIsRejected) {
  const auto s = small_splits(8, 6);
  auto r = train(small_config(), s.train, s.valid, vocab_for(s));
  const std::string dir = testing::temp_dir("ckpt_trunc");
  save_checkpoint(*r.model, {}, dir);
  const std::string bytes = read_file(dir + "/params.bin");
  std::ofstream(dir + "/params.bin", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  EXPECT_THROW(load_checkpoint(dir), Error);
  EXPECT_THROW(load_checkpoint(dir + "/nope"), Error);
}

TEST(Ablation, NoProbsIgnoresPosteriors) {
  const auto s = small_splits(8, 7);
  const Vocab vocab = vocab_for(s);
  const Ontology ont = build_ontology(s.train, default_name_split_map());
  ModelConfig cfg = small_config().model;
  cfg.use_probs = false;
  SluModel model(cfg, vocab, ont, 3);
  ModelConfig with = cfg;
  with.use_probs = true;
  SluModel biased(with, vocab, ont, 3);
  for (const auto& layer : biased.encoder().layers) biased.params()[layer.lambda].value.fill(2.0);
  for (const auto& layer : model.encoder().layers) model.params()[layer.lambda].value.fill(2.0);
  WordConfusionNetwork a;
  a.bins = {Bin{{{"i", 1.0}}}, Bin{{{"want", 0.8}, {"cheap", 0.2}}}, Bin{{{"food", 0.9}}}};
  WordConfusionNetwork b = a;
  b.bins[1].candidates[0].posterior = 0.3;
  b.bins[2].candidates[0].posterior = 0.5;
  // Bin vectors still weight words by posterior; the encoder states do not.
  Graph ga, gb;
  const Tensor oa = model.forward(ga, model.prepare(a, {})).o.value();
  const Tensor ob = model.forward(gb, model.prepare(b, {})).o.value();
  EXPECT_EQ(oa, ob);
  Graph gc, gd;
  EXPECT_NE(biased.forward(gc, biased.prepare(a, {})).o.value(),
            biased.forward(gd, biased.prepare(b, {})).o.value());
}

TEST(Ablation, NoSystemActShortensInput) {
  const auto s = small_splits(8, 8);
  const Vocab vocab = vocab_for(s);
  ModelConfig cfg = small_config().model;
  cfg.use_system_act = false;
  SluModel model(cfg, vocab, build_ontology(s.train, default_name_split_map()), 3);
  for (const auto& ex : s.train) {
    EncodedInput in;
    try {
      in = model.prepare(ex.wcn, ex.system_act);
    } catch (const Error&) {
      continue;
    }
    std::size_t wcn_tokens = 0;
    for (const auto& grp : in.groups) wcn_tokens += grp.role == TokenRole::kWcn;
    EXPECT_EQ(in.length(), wcn_tokens + 2);
  }
}

TEST(Ablation, DefaultFlagsMatchPlainModel) {
  const auto s = small_splits(8, 9);
  const Vocab vocab = vocab_for(s);
  const Ontology ont = build_ontology(s.train, default_name_split_map());
  ModelConfig cfg = small_config().model;
  SluModel a(cfg, vocab, ont, 4);
  nlohmann::json j;
  to_json(j, cfg);
  ModelConfig round = j.get<ModelConfig>();
  SluModel b(round, vocab, ont, 4);
  const auto& ex = s.train[0];
  EXPECT_EQ(a.representation(ex.wcn, ex.system_act), b.representation(ex.wcn, ex.system_act));
  ModelConfig cls = cfg;
  cls.cls_only = true;
  SluModel c(cls, vocab, ont, 4);
  EXPECT_TRUE(c.params().find("pool.cls_proj.w").has_value());
  EXPECT_EQ(c.representation(ex.wcn, ex.system_act).cols(), 32u);
}

TEST(TrainConfig, JsonRoundTripAndPresets) {
  TrainConfig c = small_config(HeadType::kHd);
  nlohmann::json j;
  to_json(j, c);
  const TrainConfig d = j.get<TrainConfig>();
  nlohmann::json k;
  to_json(k, d);
  EXPECT_EQ(j, k);
  const TrainConfig p = nlohmann::json{{"lr", "3e-5"}}.get<TrainConfig>();
  EXPECT_EQ(p.base_lr, 3e-5);
  EXPECT_THROW((nlohmann::json{{"bogus", 1}}.get<TrainConfig>()), std::exception);
  TrainConfig bad;
  bad.epochs = 0;
  EXPECT_THROW(bad.validate(), Error);
}

}  // namespace
}  // namespace wcnslu
