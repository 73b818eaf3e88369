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

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "wcnslu/autograd.hpp"
#include "wcnslu/encoder.hpp"
#include "wcnslu/heads.hpp"
#include "wcnslu/ontology.hpp"
#include "wcnslu/pooling.hpp"
#include "wcnslu/subword.hpp"
#include "wcnslu/wcn.hpp"

namespace wcnslu {

enum class HeadType { kStc, kHd };

const char* head_name(HeadType head);
HeadType parse_head(const std::string& name);

struct ModelConfig {
  HeadType head = HeadType::kStc;
  std::size_t layers = 2;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 256;
  std::size_t dec_layers = 1;
  std::size_t max_positions = 128;
  std::size_t max_value_len = 8;
  double dropout_encoder = 0.1;
  double dropout_head = 0.3;
  double dropout_decoder = 0.1;
  // Ablations.
  bool use_probs = true;
  bool cls_only = false;
  bool use_system_act = true;
  PruneConfig prune;

  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ModelConfig& c);

// Encoder, pooling and one output head wired together.
class SluModel {
 public:
  SluModel(ModelConfig config, Vocab vocab, Ontology ontology, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const Ontology& ontology() const { return ontology_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  const EncoderParams& encoder() const { return encoder_; }
  const PoolParams& pool() const { return pool_; }
  const StcParams& stc() const { return stc_; }
  const HdParams& hd() const { return hd_; }

  // Prune, flatten and assemble. Throws AllBinsPruned.
  EncodedInput prepare(const WordConfusionNetwork& wcn, const SystemAct& act) const;

  struct Forward {
    Var o;  // T x d encoder states
    Var r;  // 1 x 2d utterance representation
  };
  Forward forward(Graph& g, const EncodedInput& input, AttentionTrace* trace = nullptr) const;

  // Training loss of one example against normalized gold labels.
  Var loss(Graph& g, const EncodedInput& input, const SemanticFrame& gold) const;
  SemanticFrame decode(Graph& g, const EncodedInput& input) const;

  // Inference on raw input; a network pruned to nothing yields an empty frame.
  SemanticFrame predict(const WordConfusionNetwork& wcn, const SystemAct& act) const;
  // r in inference mode.
  Tensor representation(const WordConfusionNetwork& wcn, const SystemAct& act) const;

 private:
  ModelConfig config_;
  Vocab vocab_;
  Ontology ontology_;
  ParamStore store_;
  EncoderParams encoder_;
  PoolParams pool_;
  std::optional<ParamId> cls_proj_w_, cls_proj_b_;
  StcParams stc_;
  HdParams hd_;
};

}  // namespace wcnslu
