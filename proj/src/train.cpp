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

#include <cmath>
#include <fstream>
#include <thread>

#include "wcnslu/error.hpp"
#include "wcnslu/eval.hpp"

namespace wcnslu {

using nlohmann::json;

namespace {

// Runs fn(i) for i in [0, n) on up to 'threads' workers. Each index is
// handled by exactly one worker; callers write results to slot i only.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double parse_lr(const json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  if (s == "5e-5" || s == "3e-5" || s == "2e-5") return std::stod(s);
  throw Error(ErrorCode::kInvalidArgument, "unknown learning-rate preset '" + s + "'");
}

}  // namespace

void TrainConfig::validate() const {
  model.validate();
  if (epochs == 0) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (threads == 0) throw Error(ErrorCode::kInvalidArgument, "threads must be >= 1");
  if (!(base_lr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lr must be positive");
  if (!(warmup >= 0.0 && warmup <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "warmup must lie in [0,1]");
  if (!(weight_decay >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "weight_decay must be >= 0");
  if (!(clip_norm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "clip_norm must be positive");
}

void to_json(json& j, const TrainConfig& c) {
  j = c.model;
  j["lr"] = c.base_lr;
  j["warmup"] = c.warmup;
  j["linear_decay"] = c.linear_decay;
  j["weight_decay"] = c.weight_decay;
  j["clip_norm"] = c.clip_norm;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
}

void from_json(const json& j, TrainConfig& c) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "train config must be an object");
  json model = json::object();
  for (const auto& [key, v] : j.items()) {
    if (key == "lr" || key == "base_lr") c.base_lr = parse_lr(v);
    else if (key == "warmup") c.warmup = v.get<double>();
    else if (key == "linear_decay") c.linear_decay = v.get<bool>();
    else if (key == "weight_decay") c.weight_decay = v.get<double>();
    else if (key == "clip_norm") c.clip_norm = v.get<double>();
    else if (key == "epochs") c.epochs = v.get<std::size_t>();
    else if (key == "batch_size") c.batch_size = v.get<std::size_t>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "threads") c.threads = v.get<std::size_t>();
    else model[key] = v;
  }
  from_json(model, c.model);
}

std::vector<PreparedExample> prepare_examples(const SluModel& model, const Dataset& data,
                                              std::size_t* skipped) {
  std::vector<PreparedExample> out;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      out.push_back({model.prepare(data[i].wcn, data[i].system_act), normalize(data[i].labels), i});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAllBinsPruned) throw;
      ++dropped;
    }
  }
  if (skipped) *skipped = dropped;
  return out;
}

Optimizer::Optimizer(SluModel& model, const TrainConfig& config, std::int64_t total_steps)
    : model_(model), config_(config) {
  schedule_.base_lr = config.base_lr;
  schedule_.warmup_fraction = config.warmup;
  schedule_.total_steps = total_steps;
  schedule_.linear_decay = config.linear_decay;
  schedule_.validate();
  state_.init(model.params());
}

double Optimizer::step(std::span<const PreparedExample* const> batch) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  const std::int64_t step_no = state_.t + 1;
  const ParamStore& store = model_.params();
  const std::uint64_t graph_seed = splitmix64(config_.seed ^ splitmix64(static_cast<std::uint64_t>(step_no)));

  std::vector<double> losses(batch.size());
  std::vector<GradBuffer> grads(config_.threads > 1 ? batch.size() : 0);
  GradBuffer total(store);

  auto run = [&](std::size_t i, GradBuffer& out) {
    const PreparedExample& ex = *batch[i];
    Graph g(true, graph_seed, ex.index);
    Var loss = model_.loss(g, ex.input, ex.gold);
    losses[i] = loss.value()[0];
    if (!std::isfinite(losses[i])) {
      throw Error(ErrorCode::kNonFiniteValue, "step " + std::to_string(step_no) +
                                                  ": loss of example " + std::to_string(ex.index) +
                                                  " is not finite");
    }
    g.backward(loss);
    g.accumulate_param_grads(out);
  };

  if (config_.threads > 1) {
    parallel_for(batch.size(), config_.threads, [&](std::size_t i) {
      grads[i].reset(store);
      run(i, grads[i]);
    });
    // Fixed summation order keeps the update independent of scheduling.
    for (const GradBuffer& g : grads) total.accumulate(g);
  } else {
    for (std::size_t i = 0; i < batch.size(); ++i) run(i, total);
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  total.scale(inv);
  const AdamStepResult r = adam_step(model_.params(), total, state_, schedule_,
                                     config_.weight_decay, config_.clip_norm);
  last_lr_ = r.lr;
  last_grad_norm_ = r.grad_norm;
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum * inv;
}

std::vector<SemanticFrame> predict_all(const SluModel& model, const Dataset& data,
                                       std::size_t threads) {
  std::vector<SemanticFrame> out(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) {
    out[i] = model.predict(data[i].wcn, data[i].system_act);
  });
  return out;
}

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset& valid_set,
                  const Vocab& vocab, const std::string& log_path, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw Error(ErrorCode::kCorpusEmpty, "training set is empty");
  if (valid_set.empty()) throw Error(ErrorCode::kCorpusEmpty, "validation set is empty");

  TrainResult result;
  Ontology ontology = build_ontology(train_set, default_name_split_map());
  auto model = std::make_unique<SluModel>(config.model, vocab, ontology, config.seed);
  const std::vector<PreparedExample> examples = prepare_examples(*model, train_set, &result.skipped);
  if (examples.empty()) throw Error(ErrorCode::kCorpusEmpty, "every training example was pruned away");

  std::vector<SemanticFrame> valid_gold;
  for (const Example& ex : valid_set) valid_gold.push_back(ex.labels);

  const std::size_t per_epoch = (examples.size() + config.batch_size - 1) / config.batch_size;
  Optimizer opt(*model, config, static_cast<std::int64_t>(per_epoch * config.epochs));

  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::trunc);
    if (!log) throw Error(ErrorCode::kIo, "cannot write " + log_path);
  }

  auto snapshot = [&model] {
    std::vector<Tensor> values;
    for (ParamId id = 0; id < model->params().size(); ++id) values.push_back(model->params()[id].value);
    return values;
  };
  std::vector<Tensor> best = snapshot();
  double best_f1 = -1.0;
  Rng shuffler(config.seed, 0x73687566ULL);
  std::vector<const PreparedExample*> order;
  for (const auto& ex : examples) order.push_back(&ex);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffler.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < per_epoch; ++b) {
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::span<const PreparedExample* const> batch(order.data() + begin, end - begin);
      loss_sum += opt.step(batch) * static_cast<double>(batch.size());
    }
    const EvalReport report = evaluate(predict_all(*model, valid_set, config.threads), valid_gold);
    EpochLog entry{epoch, loss_sum / static_cast<double>(order.size()), report.f1,
                   report.utterance_accuracy, opt.last_lr()};
    result.log.push_back(entry);
    if (report.f1 > best_f1) {
      best_f1 = report.f1;
      result.best_epoch = epoch;
      best = snapshot();
    }
    if (log) {
      log << json{{"epoch", entry.epoch},
                  {"train_loss", entry.train_loss},
                  {"valid_f1", entry.valid_f1},
                  {"valid_acc", entry.valid_acc},
                  {"lr", entry.lr}}
                 .dump()
          << '\n'
          << std::flush;
    }
    if (on_epoch) on_epoch(entry);
  }
  for (ParamId id = 0; id < best.size(); ++id) model->params()[id].value = std::move(best[id]);
  result.best_valid_f1 = best_f1;
  result.model = std::move(model);
  return result;
}

}  // namespace wcnslu
