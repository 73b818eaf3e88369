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

#include "wcnslu/oracle_suite.hpp"

#include <array>
#include <functional>

#include "wcnslu/data.hpp"
#include "wcnslu/ops.hpp"
#include "wcnslu/rng.hpp"

namespace wcnslu {
namespace {

Tensor random_tensor(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Tensor t(r, c);
  for (double& v : t.values()) v = scale * rng.normal();
  return t;
}

// Contracts an arbitrary output with fixed random weights so every output
// entry contributes a distinct amount to the scalar.
Var project(Graph& g, Var y, std::uint64_t seed) {
  Rng rng(seed, 99);
  return ops::sum(ops::mul(y, g.constant(random_tensor(rng, y.rows(), y.cols()))));
}

}  // namespace

ToySetup make_toy_setup(HeadType head, std::uint64_t seed) {
  ToySetup s;
  std::vector<std::string> tokens(Vocab::special_tokens().begin(), Vocab::special_tokens().end());
  for (const char* w : {"i", "want", "wont", "chinese", "cheap", "indian", "food", "request",
                        "inform", "phone", "thank", "you", "thankyou", "price", "range", "area",
                        "north", "##s"}) {
    tokens.push_back(w);
  }
  Vocab vocab = Vocab::from_tokens(tokens);

  Dataset train(2);
  train[0].labels = {{"inform", "food", "chinese"}, {"request", "phone", ""}, {"thankyou", "", ""}};
  train[1].labels = {{"inform", "food", "indian"}, {"inform", "area", "north"}};
  for (auto& ex : train) ex.wcn.bins = {{{{"i", 1.0}}}};
  Ontology ontology = build_ontology(train, default_name_split_map());

  ModelConfig cfg;
  cfg.head = head;
  cfg.layers = 2;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.d_ff = 32;
  cfg.dec_layers = 1;
  cfg.max_positions = 16;
  cfg.max_value_len = 4;
  s.model = std::make_unique<SluModel>(cfg, vocab, ontology, seed);

  Rng rng(seed, 7);
  ParamStore& store = s.model->params();
  for (ParamId id = 0; id < store.size(); ++id) {
    for (double& v : store[id].value.values()) v = 0.3 * rng.normal();
  }

  s.wcn.bins = {
      {{{"i", 1.0}}},
      {{{"want", 0.7}}},
      {{{"cheap", 0.5}, {"chinese", 0.4}, {"!null", 0.1}}},
      {{{"um", 1.0}}},
      {{{"food", 0.9}, {"foods", 0.1}}},
  };
  s.system_act.triplets = {{"request", "food", ""}};
  s.input = s.model->prepare(s.wcn, s.system_act);
  s.gold = {{"inform", "food", "chinese"}, {"request", "phone", ""}, {"thankyou", "", ""}};
  return s;
}

std::vector<OracleResult> run_oracle_suite(const OracleSuiteOptions& opts) {
  GradCheckOptions gc;
  gc.tolerance = opts.tolerance;
  gc.step = opts.step;
  std::vector<OracleResult> results;
  Rng rng(opts.seed, 1);

  auto unary = [&](const std::string& name, const Tensor& x,
                   const std::function<Var(Graph&, Var)>& op) {
    const std::uint64_t key = results.size() + 1;
    results.push_back({name, grad_check([&](Graph& g, Var v) { return project(g, op(g, v), key); },
                                        x, gc)});
  };

  const Tensor a = random_tensor(rng, 3, 4);
  const Tensor b = random_tensor(rng, 4, 5);
  const Tensor c = random_tensor(rng, 3, 4);
  const Tensor row = random_tensor(rng, 1, 4);
  const Tensor bt = random_tensor(rng, 5, 4);
  const Tensor row2 = random_tensor(rng, 1, 4);

  unary("matmul/lhs", a, [&](Graph& g, Var x) { return ops::matmul(x, g.constant(b)); });
  unary("matmul/rhs", b, [&](Graph& g, Var x) { return ops::matmul(g.constant(a), x); });
  unary("matmul_nt/lhs", a, [&](Graph& g, Var x) { return ops::matmul_nt(x, g.constant(bt)); });
  unary("matmul_nt/rhs", bt, [&](Graph& g, Var x) { return ops::matmul_nt(g.constant(a), x); });
  unary("transpose", a, [](Graph&, Var x) { return ops::transpose(x); });
  unary("add", a, [&](Graph& g, Var x) { return ops::add(x, g.constant(c)); });
  unary("add/self", a, [](Graph&, Var x) { return ops::add(x, x); });
  unary("add_row/input", a, [&](Graph& g, Var x) { return ops::add_row(x, g.constant(row)); });
  unary("add_row/bias", row, [&](Graph& g, Var x) { return ops::add_row(g.constant(a), x); });
  unary("add_const", a, [&](Graph&, Var x) { return ops::add_const(x, c); });
  unary("scale", a, [](Graph&, Var x) { return ops::scale(x, -1.7); });
  unary("mul", a, [&](Graph& g, Var x) { return ops::mul(x, g.constant(c)); });
  unary("mul/self", a, [](Graph&, Var x) { return ops::mul(x, x); });
  unary("concat_cols", a, [&](Graph& g, Var x) {
    const std::array<Var, 3> parts{x, g.constant(c), x};
    return ops::concat_cols(parts);
  });
  unary("concat_rows", a, [&](Graph& g, Var x) {
    const std::array<Var, 3> parts{g.constant(c), x, x};
    return ops::concat_rows(parts);
  });
  unary("slice_cols", a, [](Graph&, Var x) { return ops::slice_cols(x, 1, 2); });
  unary("slice_rows", a, [](Graph&, Var x) { return ops::slice_rows(x, 1, 2); });
  unary("gather_rows", a, [](Graph&, Var x) {
    const std::array<std::size_t, 5> ids{2, 0, 2, 1, 2};
    return ops::gather_rows(x, ids);
  });
  unary("repeat_rows", row, [](Graph&, Var x) { return ops::repeat_rows(x, 3); });
  unary("mean_rows", a, [](Graph&, Var x) { return ops::mean_rows(x); });
  unary("sum", a, [](Graph&, Var x) { return ops::sum(x); });
  unary("softmax_rows", a, [](Graph&, Var x) { return ops::softmax_rows(x); });
  unary("tanh", a, [](Graph&, Var x) { return ops::tanh(x); });
  unary("relu", a, [](Graph&, Var x) { return ops::relu(x); });
  unary("sigmoid", a, [](Graph&, Var x) { return ops::sigmoid(x); });
  unary("layer_norm/input", a, [&](Graph& g, Var x) {
    return ops::layer_norm(x, g.constant(row), g.constant(row2));
  });
  unary("layer_norm/gain", row, [&](Graph& g, Var x) {
    return ops::layer_norm(g.constant(a), x, g.constant(row2));
  });
  unary("layer_norm/bias", row, [&](Graph& g, Var x) {
    return ops::layer_norm(g.constant(a), g.constant(row), x);
  });
  const std::vector<double> probs{0.9, 0.2, 1.0, 0.5};
  const Tensor lambda = random_tensor(rng, 1, 2);
  const Tensor scores = random_tensor(rng, 4, 4);
  unary("add_prob_bias/scores", scores, [&](Graph& g, Var x) {
    return ops::softmax_rows(ops::add_prob_bias(x, g.constant(lambda), 1, probs));
  });
  unary("add_prob_bias/lambda", lambda, [&](Graph& g, Var x) {
    return ops::softmax_rows(ops::add_prob_bias(g.constant(scores), x, 1, probs));
  });
  const std::array<std::size_t, 3> targets{3, 0, 1};
  unary("cross_entropy", a, [&](Graph&, Var x) { return ops::cross_entropy(x, targets); });
  const Tensor bin_targets = Tensor::from_rows({{1, 0, 0, 1}, {0, 0, 1, 1}, {1, 1, 0, 0}});
  unary("bce_with_logits", a,
        [&](Graph&, Var x) { return ops::bce_with_logits(x, bin_targets); });
  unary("nll", a, [&](Graph&, Var x) { return ops::nll(ops::softmax_rows(x), targets); });
  const Tensor gate = Tensor::from_rows({{0.2}, {0.7}, {0.5}});
  const Tensor pa = random_tensor(rng, 3, 4);
  unary("gate_mix/gate", gate, [&](Graph& g, Var x) {
    return ops::gate_mix(x, g.constant(pa), g.constant(c));
  });
  unary("gate_mix/a", pa, [&](Graph& g, Var x) {
    return ops::gate_mix(g.constant(gate), x, g.constant(c));
  });
  unary("gate_mix/b", c, [&](Graph& g, Var x) {
    return ops::gate_mix(g.constant(gate), g.constant(pa), x);
  });

  for (HeadType head : {HeadType::kStc, HeadType::kHd}) {
    ToySetup toy = make_toy_setup(head, opts.seed + 11);
    const SluModel& model = *toy.model;
    auto loss = [&](Graph& g) { return model.loss(g, toy.input, toy.gold); };
    results.push_back({std::string("loss/") + head_name(head),
                       grad_check_params(loss, toy.model->params(), {}, gc)});
  }
  return results;
}

}  // namespace wcnslu
