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

#include "wcnslu/encoder.hpp"

#include <cmath>

#include "wcnslu/error.hpp"
#include "wcnslu/ops.hpp"

namespace wcnslu {

void EncoderConfig::validate() const {
  if (vocab_size == 0) throw Error(ErrorCode::kInvalidArgument, "encoder vocabulary is empty");
  if (heads == 0 || d_model == 0 || d_model % heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "d_model must be a positive multiple of heads");
  }
  if (layers == 0) throw Error(ErrorCode::kInvalidArgument, "encoder needs at least one layer");
  if (d_ff == 0 || max_positions < 4) {
    throw Error(ErrorCode::kInvalidArgument, "invalid feed-forward or position size");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "encoder dropout must lie in [0,1)");
  }
}

Tensor init_weight(std::size_t rows, std::size_t cols, Rng& rng, double stddev) {
  Tensor t(rows, cols);
  for (double& v : t.values()) v = rng.truncated_normal(stddev);
  return t;
}

AttentionParams create_attention(ParamStore& store, const std::string& prefix, std::size_t d,
                                 Rng& rng) {
  AttentionParams p;
  p.wq = store.add(prefix + ".wq", init_weight(d, d, rng), true);
  p.bq = store.add(prefix + ".bq", Tensor(1, d), false);
  p.wk = store.add(prefix + ".wk", init_weight(d, d, rng), true);
  p.bk = store.add(prefix + ".bk", Tensor(1, d), false);
  p.wv = store.add(prefix + ".wv", init_weight(d, d, rng), true);
  p.bv = store.add(prefix + ".bv", Tensor(1, d), false);
  p.wo = store.add(prefix + ".wo", init_weight(d, d, rng), true);
  p.bo = store.add(prefix + ".bo", Tensor(1, d), false);
  return p;
}

EncoderParams EncoderParams::create(ParamStore& store, const EncoderConfig& config, Rng& rng) {
  config.validate();
  EncoderParams p;
  p.config = config;
  const std::size_t d = config.d_model;
  p.embeddings.token = store.add("emb.token", init_weight(config.vocab_size, d, rng), true);
  p.embeddings.position = store.add("emb.position", init_weight(config.max_positions, d, rng), true);
  p.embeddings.segment = store.add("emb.segment", init_weight(2, d, rng), true);
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string prefix = "enc." + std::to_string(l);
    EncoderLayerParams layer;
    layer.attn = create_attention(store, prefix + ".attn", d, rng);
    layer.lambda = store.add(prefix + ".lambda", Tensor(1, config.heads), false);
    layer.ln1_gain = store.add(prefix + ".ln1.gain", Tensor(1, d, 1.0), false);
    layer.ln1_bias = store.add(prefix + ".ln1.bias", Tensor(1, d), false);
    layer.ff1_w = store.add(prefix + ".ff1.w", init_weight(d, config.d_ff, rng), true);
    layer.ff1_b = store.add(prefix + ".ff1.b", Tensor(1, config.d_ff), false);
    layer.ff2_w = store.add(prefix + ".ff2.w", init_weight(config.d_ff, d, rng), true);
    layer.ff2_b = store.add(prefix + ".ff2.b", Tensor(1, d), false);
    layer.ln2_gain = store.add(prefix + ".ln2.gain", Tensor(1, d, 1.0), false);
    layer.ln2_bias = store.add(prefix + ".ln2.bias", Tensor(1, d), false);
    p.layers.push_back(layer);
  }
  return p;
}

AttentionOutput multi_head_attention(Graph& g, const ParamStore& store, const AttentionParams& p,
                                     Var queries, Var keys_values, std::size_t heads,
                                     const AttentionBias& bias, double dropout) {
  const std::size_t d = queries.cols();
  if (heads == 0 || d % heads != 0) {
    throw Error(ErrorCode::kShapeMismatch, "model width not divisible by head count");
  }
  const std::size_t dh = d / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  Var q = ops::add_row(ops::matmul(queries, g.param(store, p.wq)), g.param(store, p.bq));
  Var k = ops::add_row(ops::matmul(keys_values, g.param(store, p.wk)), g.param(store, p.bk));
  Var v = ops::add_row(ops::matmul(keys_values, g.param(store, p.wv)), g.param(store, p.bv));

  AttentionOutput out;
  std::vector<Var> contexts;
  for (std::size_t h = 0; h < heads; ++h) {
    Var qh = ops::slice_cols(q, h * dh, dh);
    Var kh = ops::slice_cols(k, h * dh, dh);
    Var vh = ops::slice_cols(v, h * dh, dh);
    Var scores = ops::scale(ops::matmul_nt(qh, kh), inv_sqrt);
    if (bias.lambda) scores = ops::add_prob_bias(scores, g.param(store, *bias.lambda), h, bias.probs);
    if (bias.mask) scores = ops::add_const(scores, *bias.mask);
    Var weights = ops::softmax_rows(scores);
    out.head_weights.push_back(weights);
    contexts.push_back(ops::matmul(ops::dropout(weights, dropout), vh));
  }
  out.context = heads == 1 ? contexts[0] : ops::concat_cols(contexts);
  out.output = ops::add_row(ops::matmul(out.context, g.param(store, p.wo)), g.param(store, p.bo));
  return out;
}

Var embed(Graph& g, const ParamStore& store, const EmbeddingTables& tables,
          std::span<const std::size_t> token_ids, std::span<const std::size_t> position_ids,
          std::span<const std::size_t> segment_ids) {
  if (token_ids.size() != position_ids.size() || token_ids.size() != segment_ids.size()) {
    throw Error(ErrorCode::kShapeMismatch, "token, position and segment sequences differ in length");
  }
  Var x = ops::gather_rows(g.param(store, tables.token), token_ids);
  x = ops::add(x, ops::gather_rows(g.param(store, tables.position), position_ids));
  return ops::add(x, ops::gather_rows(g.param(store, tables.segment), segment_ids));
}

Var prob_aware_attention(Graph& g, const ParamStore& store, const EncoderLayerParams& layer,
                         const EncoderConfig& config, Var x, std::span<const double> probs,
                         std::vector<Tensor>* trace) {
  if (probs.size() != x.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "probability sequence length " +
                                               std::to_string(probs.size()) + " for " +
                                               std::to_string(x.rows()) + " tokens");
  }
  AttentionBias bias;
  bias.lambda = layer.lambda;
  bias.probs = probs;
  AttentionOutput attn =
      multi_head_attention(g, store, layer.attn, x, x, config.heads, bias, config.dropout);
  if (trace) {
    for (const Var& w : attn.head_weights) trace->push_back(w.value());
  }
  Var h = ops::layer_norm(ops::add(x, attn.output), g.param(store, layer.ln1_gain),
                          g.param(store, layer.ln1_bias));
  Var ff = ops::relu(ops::add_row(ops::matmul(h, g.param(store, layer.ff1_w)),
                                  g.param(store, layer.ff1_b)));
  ff = ops::add_row(ops::matmul(ff, g.param(store, layer.ff2_w)), g.param(store, layer.ff2_b));
  ff = ops::dropout(ff, config.dropout);
  return ops::layer_norm(ops::add(h, ff), g.param(store, layer.ln2_gain),
                         g.param(store, layer.ln2_bias));
}

Var encoder_forward(Graph& g, const ParamStore& store, const EncoderParams& params,
                    const EncodedInput& input, std::span<const double> probs,
                    AttentionTrace* trace) {
  if (params.layers.empty()) throw Error(ErrorCode::kInvalidArgument, "encoder has no layers");
  for (std::size_t pos : input.position_ids) {
    if (pos >= params.config.max_positions) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "position " + std::to_string(pos) + " exceeds the position table (" +
                      std::to_string(params.config.max_positions) + ")");
    }
  }
  std::span<const double> p = probs.empty() ? std::span<const double>(input.probs) : probs;
  Var x = embed(g, store, params.embeddings, input.token_ids, input.position_ids, input.segment_ids);
  x = ops::dropout(x, params.config.dropout);
  if (trace) trace->weights.clear();
  for (const auto& layer : params.layers) {
    std::vector<Tensor>* layer_trace = nullptr;
    if (trace) layer_trace = &trace->weights.emplace_back();
    x = prob_aware_attention(g, store, layer, params.config, x, p, layer_trace);
  }
  return x;
}

}  // namespace wcnslu
