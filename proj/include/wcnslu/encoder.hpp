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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wcnslu/autograd.hpp"
#include "wcnslu/wcn.hpp"

namespace wcnslu {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 256;
  std::size_t layers = 2;
  std::size_t max_positions = 128;
  double dropout = 0.1;

  void validate() const;
};

// x_t = E_token[id_t] + E_pos[pos_t] + E_seg[seg_t]
struct EmbeddingTables {
  ParamId token = 0;     // |V| x d
  ParamId position = 0;  // max_positions x d
  ParamId segment = 0;   // 2 x d
};

// Projections of one multi-head attention block. Head h uses columns
// [h*d/H, (h+1)*d/H) of the Q/K/V projections.
struct AttentionParams {
  ParamId wq = 0, bq = 0, wk = 0, bk = 0, wv = 0, bv = 0, wo = 0, bo = 0;
};

struct EncoderLayerParams {
  AttentionParams attn;
  ParamId lambda = 0;  // 1 x H, weight of the posterior bias per head
  ParamId ln1_gain = 0, ln1_bias = 0;
  ParamId ff1_w = 0, ff1_b = 0, ff2_w = 0, ff2_b = 0;
  ParamId ln2_gain = 0, ln2_bias = 0;
};

struct EncoderParams {
  EncoderConfig config;
  EmbeddingTables embeddings;
  std::vector<EncoderLayerParams> layers;

  // Truncated normal (sigma 0.02) weights, zero biases, unit gains, zero lambda.
  static EncoderParams create(ParamStore& store, const EncoderConfig& config, Rng& rng);
};

Tensor init_weight(std::size_t rows, std::size_t cols, Rng& rng, double stddev = 0.02);
AttentionParams create_attention(ParamStore& store, const std::string& prefix, std::size_t d_model,
                                 Rng& rng);

// Attention weights captured per layer and head (each T x T), for tests and
// inspection.
struct AttentionTrace {
  std::vector<std::vector<Tensor>> weights;
};

struct AttentionBias {
  // Probability-aware term lambda[h] * probs[j] added to every logit e_ij.
  std::optional<ParamId> lambda;
  std::span<const double> probs;
  // Additive constant mask (e.g. -inf above the diagonal); empty for none.
  const Tensor* mask = nullptr;
};

struct AttentionOutput {
  Var context;                    // heads concatenated, before the output projection
  Var output;                     // after the output projection
  std::vector<Var> head_weights;  // softmax weights per head
};

AttentionOutput multi_head_attention(Graph& g, const ParamStore& store, const AttentionParams& p,
                                     Var queries, Var keys_values, std::size_t heads,
                                     const AttentionBias& bias, double dropout);

Var embed(Graph& g, const ParamStore& store, const EmbeddingTables& tables,
          std::span<const std::size_t> token_ids, std::span<const std::size_t> position_ids,
          std::span<const std::size_t> segment_ids);

// One encoder layer with the posterior-biased logits
//   e_ij = (W_Q x_i)^T (W_K x_j) / sqrt(d/H) + lambda_h * p_j
// followed by LayerNorm(x + FC(z)) and LayerNorm(x~ + FC(ReLU(FC(x~)))).
Var prob_aware_attention(Graph& g, const ParamStore& store, const EncoderLayerParams& layer,
                         const EncoderConfig& config, Var x, std::span<const double> probs,
                         std::vector<Tensor>* trace = nullptr);

// Embeds the input and runs every layer; returns o (T x d). probs overrides
// input.probs when non-empty (used for the no-probability ablation).
Var encoder_forward(Graph& g, const ParamStore& store, const EncoderParams& params,
                    const EncodedInput& input, std::span<const double> probs = {},
                    AttentionTrace* trace = nullptr);

}  // namespace wcnslu
