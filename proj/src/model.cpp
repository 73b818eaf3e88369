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

#include "wcnslu/model.hpp"

#include <array>

#include "wcnslu/error.hpp"
#include "wcnslu/ops.hpp"

namespace wcnslu {

using nlohmann::json;

const char* head_name(HeadType head) { return head == HeadType::kStc ? "stc" : "hd"; }

HeadType parse_head(const std::string& name) {
  const std::string lower = to_lower(name);
  if (lower == "stc") return HeadType::kStc;
  if (lower == "hd") return HeadType::kHd;
  throw Error(ErrorCode::kInvalidArgument, "unknown head '" + name + "' (expected stc or hd)");
}

void ModelConfig::validate() const {
  auto check_rate = [](double p, const char* what) {
    if (!(p >= 0.0 && p < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be in [0, 1)");
    }
  };
  check_rate(dropout_encoder, "dropout_encoder");
  check_rate(dropout_head, "dropout_head");
  check_rate(dropout_decoder, "dropout_decoder");
  if (layers == 0 || dec_layers == 0) throw Error(ErrorCode::kInvalidArgument, "layer counts must be >= 1");
  if (heads == 0 || d_model % heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "d_model must be a positive multiple of heads");
  }
  if (d_ff == 0 || max_positions < 2 || max_value_len == 0) {
    throw Error(ErrorCode::kInvalidArgument, "d_ff, max_positions and max_value_len must be positive");
  }
  prune.validate();
}

void to_json(json& j, const ModelConfig& c) {
  j = json{{"head", head_name(c.head)},
           {"layers", c.layers},
           {"d_model", c.d_model},
           {"heads", c.heads},
           {"d_ff", c.d_ff},
           {"dec_layers", c.dec_layers},
           {"max_positions", c.max_positions},
           {"max_value_len", c.max_value_len},
           {"dropout_encoder", c.dropout_encoder},
           {"dropout_head", c.dropout_head},
           {"dropout_decoder", c.dropout_decoder},
           {"use_probs", c.use_probs},
           {"cls_only", c.cls_only},
           {"use_system_act", c.use_system_act},
           {"prune_threshold", c.prune.prob_threshold},
           {"interjections", std::vector<std::string>(c.prune.interjections.begin(),
                                                      c.prune.interjections.end())},
           {"null_token", c.prune.null_token}};
}

void from_json(const json& j, ModelConfig& c) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "model config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "head") c.head = parse_head(value.get<std::string>());
    else if (key == "layers") c.layers = value.get<std::size_t>();
    else if (key == "d_model") c.d_model = value.get<std::size_t>();
    else if (key == "heads") c.heads = value.get<std::size_t>();
    else if (key == "d_ff") c.d_ff = value.get<std::size_t>();
    else if (key == "dec_layers") c.dec_layers = value.get<std::size_t>();
    else if (key == "max_positions") c.max_positions = value.get<std::size_t>();
    else if (key == "max_value_len") c.max_value_len = value.get<std::size_t>();
    else if (key == "dropout_encoder") c.dropout_encoder = value.get<double>();
    else if (key == "dropout_head") c.dropout_head = value.get<double>();
    else if (key == "dropout_decoder") c.dropout_decoder = value.get<double>();
    else if (key == "use_probs") c.use_probs = value.get<bool>();
    else if (key == "cls_only") c.cls_only = value.get<bool>();
    else if (key == "use_system_act") c.use_system_act = value.get<bool>();
    else if (key == "prune_threshold") c.prune.prob_threshold = value.get<double>();
    else if (key == "interjections") {
      const auto words = value.get<std::vector<std::string>>();
      c.prune.interjections = std::set<std::string>(words.begin(), words.end());
    } else if (key == "null_token") c.prune.null_token = value.get<std::string>();
    else throw Error(ErrorCode::kInvalidArgument, "unknown model config key '" + key + "'");
  }
}

SluModel::SluModel(ModelConfig config, Vocab vocab, Ontology ontology, std::uint64_t seed)
    : config_(std::move(config)), vocab_(std::move(vocab)), ontology_(std::move(ontology)) {
  config_.validate();
  Rng rng(seed, 0x6d6f64656cULL);
  EncoderConfig enc;
  enc.vocab_size = vocab_.size();
  enc.d_model = config_.d_model;
  enc.heads = config_.heads;
  enc.d_ff = config_.d_ff;
  enc.layers = config_.layers;
  enc.max_positions = config_.max_positions;
  enc.dropout = config_.dropout_encoder;
  encoder_ = EncoderParams::create(store_, enc, rng);

  const std::size_t d = config_.d_model;
  if (config_.cls_only) {
    cls_proj_w_ = store_.add("pool.cls_proj.w", init_weight(d, 2 * d, rng), true);
    cls_proj_b_ = store_.add("pool.cls_proj.b", Tensor(1, 2 * d), false);
  } else {
    pool_ = PoolParams::create(store_, d, rng);
  }

  if (config_.head == HeadType::kStc) {
    stc_ = StcParams::create(store_, ontology_, 2 * d, rng);
  } else {
    HdConfig hd;
    hd.d_model = d;
    hd.heads = config_.heads;
    hd.d_ff = config_.d_ff;
    hd.layers = config_.dec_layers;
    hd.max_len = config_.max_value_len;
    hd.dropout = config_.dropout_decoder;
    hd_ = HdParams::create(store_, ontology_, hd, 2 * d, encoder_.embeddings.token, rng);
  }
}

EncodedInput SluModel::prepare(const WordConfusionNetwork& wcn, const SystemAct& act) const {
  const WordConfusionNetwork pruned = prune_wcn(wcn, config_.prune);
  AssembleOptions opts;
  opts.include_system_act = config_.use_system_act;
  return assemble_input(pruned, act, vocab_, ontology_.name_split_map(), opts);
}

SluModel::Forward SluModel::forward(Graph& g, const EncodedInput& input,
                                    AttentionTrace* trace) const {
  Forward out;
  if (config_.use_probs) {
    out.o = encoder_forward(g, store_, encoder_, input, {}, trace);
  } else {
    const std::vector<double> ones(input.length(), 1.0);
    out.o = encoder_forward(g, store_, encoder_, input, ones, trace);
  }
  Var u = aggregate_bins(out.o, input);
  Var cls = ops::slice_rows(u, 0, 1);
  if (config_.cls_only) {
    out.r = ops::add_row(ops::matmul(cls, g.param(store_, *cls_proj_w_)),
                         g.param(store_, *cls_proj_b_));
  } else {
    out.r = utterance_repr(cls, self_attentive_pool(g, store_, pool_, u));
  }
  out.r = ops::dropout(out.r, config_.dropout_head);
  return out;
}

Var SluModel::loss(Graph& g, const EncodedInput& input, const SemanticFrame& gold) const {
  const SemanticFrame target = normalize(gold);
  Forward f = forward(g, input);
  if (config_.head == HeadType::kStc) {
    return stc_loss(stc_forward(g, store_, stc_, f.r, ontology_), target, ontology_);
  }
  return hd_loss(g, store_, hd_, f.r, f.o, input.token_ids, target, ontology_, vocab_).total;
}

SemanticFrame SluModel::decode(Graph& g, const EncodedInput& input) const {
  Forward f = forward(g, input);
  if (config_.head == HeadType::kStc) {
    return stc_decode(StcScores::from(stc_forward(g, store_, stc_, f.r, ontology_)), ontology_);
  }
  return hd_decode(g, store_, hd_, f.r, f.o, input.token_ids, ontology_, vocab_);
}

SemanticFrame SluModel::predict(const WordConfusionNetwork& wcn, const SystemAct& act) const {
  EncodedInput input;
  try {
    input = prepare(wcn, act);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kAllBinsPruned) return {};
    throw;
  }
  Graph g(false);
  g.set_grad_enabled(false);
  return decode(g, input);
}

Tensor SluModel::representation(const WordConfusionNetwork& wcn, const SystemAct& act) const {
  const EncodedInput input = prepare(wcn, act);
  Graph g(false);
  g.set_grad_enabled(false);
  return forward(g, input).r.value();
}

}  // namespace wcnslu
