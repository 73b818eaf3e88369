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
#include "wcnslu/encoder.hpp"
#include "wcnslu/frame.hpp"
#include "wcnslu/ontology.hpp"
#include "wcnslu/subword.hpp"

namespace wcnslu {

// ---------------------------------------------------------------------------
// Semantic tuple classifier
// ---------------------------------------------------------------------------

struct StcParams {
  ParamId exist_w = 0;  // repr x P, one existence logit per act-slot pair
  ParamId exist_b = 0;
  // One value classifier per valued pair, in Ontology::valued_pairs() order.
  std::vector<ParamId> value_w;
  std::vector<ParamId> value_b;

  static StcParams create(ParamStore& store, const Ontology& ontology, std::size_t repr_dim,
                          Rng& rng);
};

struct StcLogits {
  Var existence;            // 1 x P
  std::vector<Var> values;  // per valued pair, 1 x |values_of(pair)|
};

struct StcScores {
  Tensor existence;
  std::vector<Tensor> values;

  static StcScores from(const StcLogits& logits);
};

StcLogits stc_forward(Graph& g, const ParamStore& store, const StcParams& params, Var r,
                      const Ontology& ontology);

// BCE over every pair's existence plus cross-entropy of each gold value of a
// valued pair. Gold triplets outside the ontology contribute nothing.
Var stc_loss(const StcLogits& logits, const SemanticFrame& gold, const Ontology& ontology);

// A pair is emitted iff sigmoid(logit) > threshold; its value is the argmax of
// the value logits (lowest index on ties). No-value pairs emit an empty value.
SemanticFrame stc_decode(const StcScores& scores, const Ontology& ontology, double threshold = 0.5);

// ---------------------------------------------------------------------------
// Hierarchical decoder: act classifier -> slot classifier -> value generator
// ---------------------------------------------------------------------------

struct DecoderLayerParams {
  AttentionParams self_attn;
  AttentionParams cross_attn;
  ParamId ln1_gain = 0, ln1_bias = 0;
  ParamId ln2_gain = 0, ln2_bias = 0;
  ParamId ff1_w = 0, ff1_b = 0, ff2_w = 0, ff2_b = 0;
  ParamId ln3_gain = 0, ln3_bias = 0;
};

struct HdConfig {
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 256;
  std::size_t layers = 1;
  std::size_t max_len = 8;
  double dropout = 0.1;
};

struct HdParams {
  HdConfig config;
  ParamId act_w = 0, act_b = 0;      // repr -> |acts|
  ParamId slot_w = 0, slot_b = 0;    // repr + d -> |slots| + 1 (last = NONE)
  ParamId start_w = 0, start_b = 0;  // repr + 2d -> d
  ParamId dec_position = 0;          // (max_len + 1) x d
  std::vector<DecoderLayerParams> layers;
  ParamId gate_w = 0, gate_b = 0;    // 3d -> 1
  // Output projection is tied to the encoder token table (shared storage).
  ParamId token_embedding = 0;

  static HdParams create(ParamStore& store, const Ontology& ontology, const HdConfig& config,
                         std::size_t repr_dim, ParamId token_embedding, Rng& rng);
};

// Mean of the token-embedding rows of the sub-words of an act or slot name
// (after compound-name splitting).
Var name_feature(Graph& g, const ParamStore& store, ParamId token_embedding, const Vocab& vocab,
                 const NameSplitMap& split_map, const std::string& name);

struct DecoderOutput {
  Var distribution;  // n x |V|, p_gen * vocab + (1 - p_gen) * copy
  Var gate;          // n x 1, p_gen
  Var vocab_probs;   // n x |V|, softmax(h E_token^T)
  Var copy_probs;    // n x |V|, final-layer cross attention (heads averaged) pooled by token id
};

// Runs the value generator over [start, prefix...]; row i predicts token i.
// gate_override pins p_gen (tests use 0 and 1).
DecoderOutput run_decoder(Graph& g, const ParamStore& store, const HdParams& params, Var start,
                          std::span<const std::size_t> prefix, Var encoder_states,
                          std::span<const std::size_t> input_token_ids,
                          std::optional<double> gate_override = std::nullopt);

Var decoder_start(Graph& g, const ParamStore& store, const HdParams& params, Var r, Var act_feature,
                  Var slot_feature);

struct HdLoss {
  Var total;
  Var act;
  Var slot;
  Var value;
  std::size_t value_terms = 0;  // number of token-level cross-entropy terms
};

// Teacher-forced training loss. Throws UnknownActOrSlot for gold acts or
// slots missing from the ontology.
HdLoss hd_loss(Graph& g, const ParamStore& store, const HdParams& params, Var r, Var o,
               std::span<const std::size_t> input_token_ids, const SemanticFrame& gold,
               const Ontology& ontology, const Vocab& vocab);

struct GenerateOptions {
  std::optional<std::size_t> max_len;  // defaults to the configured length
  std::optional<double> gate_override;
};

// Greedy decoding (lowest id on ties) until [EOS] or max_len tokens. Returns
// sub-word pieces without the [EOS].
std::vector<std::string> value_generate(Graph& g, const ParamStore& store, const HdParams& params,
                                        Var start, Var o,
                                        std::span<const std::size_t> input_token_ids,
                                        const Vocab& vocab, const GenerateOptions& opts = {});

struct HdDecodeOptions {
  double act_threshold = 0.5;
  double slot_threshold = 0.5;
  GenerateOptions generate;
  // Incremented once per value_generate call when set.
  std::size_t* generate_calls = nullptr;
};

SemanticFrame hd_decode(Graph& g, const ParamStore& store, const HdParams& params, Var r, Var o,
                        std::span<const std::size_t> input_token_ids, const Ontology& ontology,
                        const Vocab& vocab, const HdDecodeOptions& opts = {});

}  // namespace wcnslu
