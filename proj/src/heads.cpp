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

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "wcnslu/error.hpp"
#include "wcnslu/ops.hpp"

namespace wcnslu {
namespace {

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

Var linear(Graph& g, const ParamStore& store, Var x, ParamId w, ParamId b) {
  return ops::add_row(ops::matmul(x, g.param(store, w)), g.param(store, b));
}

Var zero_scalar(Graph& g) { return g.constant(Tensor::scalar(0.0)); }

std::vector<std::size_t> value_targets(const Vocab& vocab, const std::string& value,
                                       std::size_t max_len) {
  std::vector<std::size_t> ids;
  std::istringstream words(value);
  for (std::string w; words >> w;) {
    for (std::size_t id : vocab.encode_word(w)) ids.push_back(id);
  }
  if (ids.size() > max_len) ids.resize(max_len);
  ids.push_back(Vocab::kEos);
  return ids;
}

}  // namespace

// --- STC --------------------------------------------------------------------

StcParams StcParams::create(ParamStore& store, const Ontology& ontology, std::size_t repr_dim,
                            Rng& rng) {
  StcParams p;
  const std::size_t pairs = ontology.act_slot_pairs().size();
  p.exist_w = store.add("stc.exist.w", init_weight(repr_dim, pairs, rng), true);
  p.exist_b = store.add("stc.exist.b", Tensor(1, pairs), false);
  for (std::size_t idx : ontology.valued_pairs()) {
    const auto& pair = ontology.act_slot_pairs()[idx];
    const std::size_t n = ontology.values_of(pair).size();
    const std::string prefix = "stc.value." + pair.first + "." + pair.second;
    p.value_w.push_back(store.add(prefix + ".w", init_weight(repr_dim, n, rng), true));
    p.value_b.push_back(store.add(prefix + ".b", Tensor(1, n), false));
  }
  return p;
}

StcScores StcScores::from(const StcLogits& logits) {
  StcScores s;
  s.existence = logits.existence.value();
  for (const Var& v : logits.values) s.values.push_back(v.value());
  return s;
}

StcLogits stc_forward(Graph& g, const ParamStore& store, const StcParams& params, Var r,
                      const Ontology& ontology) {
  if (r.rows() != 1 || r.cols() != store[params.exist_w].value.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "stc_forward: representation " + r.value().shape_string());
  }
  StcLogits out;
  out.existence = linear(g, store, r, params.exist_w, params.exist_b);
  for (std::size_t k = 0; k < ontology.valued_pairs().size(); ++k) {
    out.values.push_back(linear(g, store, r, params.value_w[k], params.value_b[k]));
  }
  return out;
}

Var stc_loss(const StcLogits& logits, const SemanticFrame& gold, const Ontology& ontology) {
  Tensor exist_target(1, ontology.act_slot_pairs().size());
  std::vector<std::vector<std::size_t>> value_targets(ontology.valued_pairs().size());
  std::map<std::size_t, std::size_t> valued_slot;
  for (std::size_t k = 0; k < ontology.valued_pairs().size(); ++k) {
    valued_slot[ontology.valued_pairs()[k]] = k;
  }
  for (const auto& t : gold.triplets) {
    const ActSlot pair{t.act, t.slot};
    auto idx = ontology.pair_index(pair);
    if (!idx) continue;
    exist_target[*idx] = 1.0;
    if (t.value.empty()) continue;
    auto vk = valued_slot.find(*idx);
    if (vk == valued_slot.end()) continue;
    if (auto vi = ontology.value_index(pair, t.value)) value_targets[vk->second].push_back(*vi);
  }
  Var loss = ops::bce_with_logits(logits.existence, exist_target);
  for (std::size_t k = 0; k < value_targets.size(); ++k) {
    for (std::size_t target : value_targets[k]) {
      const std::array<std::size_t, 1> t{target};
      loss = ops::add(loss, ops::cross_entropy(logits.values[k], t));
    }
  }
  return loss;
}

SemanticFrame stc_decode(const StcScores& scores, const Ontology& ontology, double threshold) {
  SemanticFrame frame;
  const auto& pairs = ontology.act_slot_pairs();
  std::map<std::size_t, std::size_t> valued_slot;
  for (std::size_t k = 0; k < ontology.valued_pairs().size(); ++k) {
    valued_slot[ontology.valued_pairs()[k]] = k;
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!(sigmoid(scores.existence[i]) > threshold)) continue;
    auto vk = valued_slot.find(i);
    if (vk == valued_slot.end()) {
      frame.insert({pairs[i].first, pairs[i].second, ""});
      continue;
    }
    const Tensor& logits = scores.values.at(vk->second);
    const auto& values = ontology.values_of(pairs[i]);
    frame.insert({pairs[i].first, pairs[i].second, values[argmax(logits.values())]});
  }
  return frame;
}

// --- HD ---------------------------------------------------------------------

HdParams HdParams::create(ParamStore& store, const Ontology& ontology, const HdConfig& config,
                          std::size_t repr_dim, ParamId token_embedding, Rng& rng) {
  if (config.max_len == 0) throw Error(ErrorCode::kInvalidArgument, "value length must be >= 1");
  if (config.layers == 0) throw Error(ErrorCode::kInvalidArgument, "decoder needs a layer");
  HdParams p;
  p.config = config;
  p.token_embedding = token_embedding;
  const std::size_t d = config.d_model;
  const std::size_t acts = ontology.acts().size();
  const std::size_t slots = ontology.slots().size() + 1;
  p.act_w = store.add("hd.act.w", init_weight(repr_dim, acts, rng), true);
  p.act_b = store.add("hd.act.b", Tensor(1, acts), false);
  p.slot_w = store.add("hd.slot.w", init_weight(repr_dim + d, slots, rng), true);
  p.slot_b = store.add("hd.slot.b", Tensor(1, slots), false);
  p.start_w = store.add("hd.start.w", init_weight(repr_dim + 2 * d, d, rng), true);
  p.start_b = store.add("hd.start.b", Tensor(1, d), false);
  p.dec_position = store.add("hd.position", init_weight(config.max_len + 1, d, rng), true);
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string prefix = "hd.dec." + std::to_string(l);
    DecoderLayerParams layer;
    layer.self_attn = create_attention(store, prefix + ".self", d, rng);
    layer.ln1_gain = store.add(prefix + ".ln1.gain", Tensor(1, d, 1.0), false);
    layer.ln1_bias = store.add(prefix + ".ln1.bias", Tensor(1, d), false);
    layer.cross_attn = create_attention(store, prefix + ".cross", d, rng);
    layer.ln2_gain = store.add(prefix + ".ln2.gain", Tensor(1, d, 1.0), false);
    layer.ln2_bias = store.add(prefix + ".ln2.bias", Tensor(1, d), false);
    layer.ff1_w = store.add(prefix + ".ff1.w", init_weight(d, config.d_ff, rng), true);
    layer.ff1_b = store.add(prefix + ".ff1.b", Tensor(1, config.d_ff), false);
    layer.ff2_w = store.add(prefix + ".ff2.w", init_weight(config.d_ff, d, rng), true);
    layer.ff2_b = store.add(prefix + ".ff2.b", Tensor(1, d), false);
    layer.ln3_gain = store.add(prefix + ".ln3.gain", Tensor(1, d, 1.0), false);
    layer.ln3_bias = store.add(prefix + ".ln3.bias", Tensor(1, d), false);
    p.layers.push_back(layer);
  }
  p.gate_w = store.add("hd.gate.w", init_weight(3 * d, 1, rng), true);
  p.gate_b = store.add("hd.gate.b", Tensor(1, 1), false);
  return p;
}

Var name_feature(Graph& g, const ParamStore& store, ParamId token_embedding, const Vocab& vocab,
                 const NameSplitMap& split_map, const std::string& name) {
  std::vector<std::string> words;
  if (auto it = split_map.find(name); it != split_map.end()) {
    words = it->second;
  } else {
    words.push_back(name);
  }
  std::vector<std::size_t> ids;
  for (const auto& w : words) {
    for (std::size_t id : vocab.encode_word(w)) ids.push_back(id);
  }
  if (ids.empty()) ids.push_back(Vocab::kUnk);
  Var rows = ops::gather_rows(g.param(store, token_embedding), ids);
  return ids.size() == 1 ? rows : ops::mean_rows(rows);
}

Var decoder_start(Graph& g, const ParamStore& store, const HdParams& params, Var r, Var act_feature,
                  Var slot_feature) {
  const std::array<Var, 3> parts{r, act_feature, slot_feature};
  return linear(g, store, ops::concat_cols(parts), params.start_w, params.start_b);
}

DecoderOutput run_decoder(Graph& g, const ParamStore& store, const HdParams& params, Var start,
                          std::span<const std::size_t> prefix, Var encoder_states,
                          std::span<const std::size_t> input_token_ids,
                          std::optional<double> gate_override) {
  const HdConfig& cfg = params.config;
  const std::size_t n = prefix.size() + 1;
  if (n > cfg.max_len + 1) {
    throw Error(ErrorCode::kIndexOutOfRange, "decoder prefix longer than the value length limit");
  }
  if (input_token_ids.size() != encoder_states.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "input token ids do not match encoder states");
  }
  Var table = g.param(store, params.token_embedding);
  const std::size_t vocab_size = table.rows();

  Var x = start;
  if (!prefix.empty()) {
    const std::array<Var, 2> rows{start, ops::gather_rows(table, prefix)};
    x = ops::concat_rows(rows);
  }
  std::vector<std::size_t> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = i;
  x = ops::add(x, ops::gather_rows(g.param(store, params.dec_position), positions));
  x = ops::dropout(x, cfg.dropout);

  Tensor causal(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) causal(i, j) = -std::numeric_limits<double>::infinity();

  AttentionOutput cross;
  for (const auto& layer : params.layers) {
    AttentionBias self_bias;
    self_bias.mask = &causal;
    AttentionOutput self = multi_head_attention(g, store, layer.self_attn, x, x, cfg.heads,
                                                self_bias, cfg.dropout);
    x = ops::layer_norm(ops::add(x, self.output), g.param(store, layer.ln1_gain),
                        g.param(store, layer.ln1_bias));
    cross = multi_head_attention(g, store, layer.cross_attn, x, encoder_states, cfg.heads, {},
                                 cfg.dropout);
    x = ops::layer_norm(ops::add(x, cross.output), g.param(store, layer.ln2_gain),
                        g.param(store, layer.ln2_bias));
    Var ff = ops::relu(linear(g, store, x, layer.ff1_w, layer.ff1_b));
    ff = ops::dropout(linear(g, store, ff, layer.ff2_w, layer.ff2_b), cfg.dropout);
    x = ops::layer_norm(ops::add(x, ff), g.param(store, layer.ln3_gain),
                        g.param(store, layer.ln3_bias));
  }

  DecoderOutput out;
  out.vocab_probs = ops::softmax_rows(ops::matmul_nt(x, table));

  Var attn = cross.head_weights[0];
  for (std::size_t h = 1; h < cross.head_weights.size(); ++h) {
    attn = ops::add(attn, cross.head_weights[h]);
  }
  attn = ops::scale(attn, 1.0 / static_cast<double>(cross.head_weights.size()));
  Tensor scatter(input_token_ids.size(), vocab_size);
  for (std::size_t t = 0; t < input_token_ids.size(); ++t) scatter(t, input_token_ids[t]) = 1.0;
  out.copy_probs = ops::matmul(attn, g.constant(std::move(scatter)));

  if (gate_override) {
    out.gate = g.constant(Tensor(n, 1, *gate_override));
  } else {
    const std::array<Var, 3> parts{x, cross.context, ops::repeat_rows(start, n)};
    out.gate = ops::sigmoid(linear(g, store, ops::concat_cols(parts), params.gate_w, params.gate_b));
  }
  out.distribution = ops::gate_mix(out.gate, out.vocab_probs, out.copy_probs);
  return out;
}

HdLoss hd_loss(Graph& g, const ParamStore& store, const HdParams& params, Var r, Var o,
               std::span<const std::size_t> input_token_ids, const SemanticFrame& gold,
               const Ontology& ontology, const Vocab& vocab) {
  const std::size_t num_slots = ontology.slots().size() + 1;
  const std::size_t none_slot = num_slots - 1;

  Tensor act_target(1, ontology.acts().size());
  std::map<std::string, std::vector<const Triplet*>> by_act;
  for (const auto& t : gold.triplets) {
    auto ai = ontology.act_index(t.act);
    if (!ai) throw Error(ErrorCode::kUnknownActOrSlot, "unknown act '" + t.act + "'");
    if (!t.slot.empty() && !ontology.slot_index(t.slot)) {
      throw Error(ErrorCode::kUnknownActOrSlot, "unknown slot '" + t.slot + "'");
    }
    act_target[*ai] = 1.0;
    by_act[t.act].push_back(&t);
  }

  HdLoss loss;
  Var act_logits = linear(g, store, r, params.act_w, params.act_b);
  loss.act = ops::bce_with_logits(act_logits, act_target);
  loss.slot = zero_scalar(g);
  loss.value = zero_scalar(g);

  for (const auto& [act, triplets] : by_act) {
    Var e_a = name_feature(g, store, params.token_embedding, vocab, ontology.name_split_map(), act);
    const std::array<Var, 2> slot_in{r, e_a};
    Var slot_logits = linear(g, store, ops::concat_cols(slot_in), params.slot_w, params.slot_b);
    Tensor slot_target(1, num_slots);
    for (const Triplet* t : triplets) {
      slot_target[t->slot.empty() ? none_slot : *ontology.slot_index(t->slot)] = 1.0;
    }
    loss.slot = ops::add(loss.slot, ops::bce_with_logits(slot_logits, slot_target));

    for (const Triplet* t : triplets) {
      if (t->slot.empty() || t->value.empty()) continue;
      if (ontology.is_no_value({t->act, t->slot})) continue;
      Var e_s = name_feature(g, store, params.token_embedding, vocab, ontology.name_split_map(),
                             t->slot);
      Var start = decoder_start(g, store, params, r, e_a, e_s);
      const std::vector<std::size_t> targets = value_targets(vocab, t->value, params.config.max_len);
      const std::span<const std::size_t> prefix(targets.data(), targets.size() - 1);
      DecoderOutput dec = run_decoder(g, store, params, start, prefix, o, input_token_ids);
      loss.value = ops::add(loss.value, ops::nll(dec.distribution, targets));
      loss.value_terms += targets.size();
    }
  }
  loss.total = ops::add(ops::add(loss.act, loss.slot), loss.value);
  return loss;
}

std::vector<std::string> value_generate(Graph& g, const ParamStore& store, const HdParams& params,
                                        Var start, Var o,
                                        std::span<const std::size_t> input_token_ids,
                                        const Vocab& vocab, const GenerateOptions& opts) {
  const std::size_t max_len = std::min(opts.max_len.value_or(params.config.max_len),
                                       params.config.max_len);
  if (max_len == 0) throw Error(ErrorCode::kInvalidArgument, "max_len must be >= 1");
  std::vector<std::size_t> prefix;
  std::vector<std::string> pieces;
  while (prefix.size() < max_len) {
    DecoderOutput dec = run_decoder(g, store, params, start, prefix, o, input_token_ids,
                                    opts.gate_override);
    const Tensor& dist = dec.distribution.value();
    auto last = dist.row_span(dist.rows() - 1);
    // [PAD], [UNK], [CLS] and [SEP] are never emitted as value pieces.
    std::size_t best = Vocab::kEos;
    for (std::size_t v = Vocab::kEos + 1; v < last.size(); ++v) {
      if (last[v] > last[best]) best = v;
    }
    if (best == Vocab::kEos) break;
    prefix.push_back(best);
    pieces.push_back(vocab.token(best));
  }
  return pieces;
}

SemanticFrame hd_decode(Graph& g, const ParamStore& store, const HdParams& params, Var r, Var o,
                        std::span<const std::size_t> input_token_ids, const Ontology& ontology,
                        const Vocab& vocab, const HdDecodeOptions& opts) {
  SemanticFrame frame;
  const Tensor act_logits = linear(g, store, r, params.act_w, params.act_b).value();
  const std::size_t none_slot = ontology.slots().size();
  for (std::size_t a = 0; a < ontology.acts().size(); ++a) {
    if (!(sigmoid(act_logits[a]) > opts.act_threshold)) continue;
    const std::string& act = ontology.acts()[a];
    Var e_a = name_feature(g, store, params.token_embedding, vocab, ontology.name_split_map(), act);
    const std::array<Var, 2> slot_in{r, e_a};
    const Tensor slot_logits =
        linear(g, store, ops::concat_cols(slot_in), params.slot_w, params.slot_b).value();
    for (std::size_t s = 0; s < slot_logits.cols(); ++s) {
      if (!(sigmoid(slot_logits[s]) > opts.slot_threshold)) continue;
      if (s == none_slot) {
        frame.insert({act, "", ""});
        continue;
      }
      const std::string& slot = ontology.slots()[s];
      if (ontology.is_no_value({act, slot})) {
        frame.insert({act, slot, ""});
        continue;
      }
      Var e_s = name_feature(g, store, params.token_embedding, vocab, ontology.name_split_map(), slot);
      Var start = decoder_start(g, store, params, r, e_a, e_s);
      if (opts.generate_calls) ++*opts.generate_calls;
      const auto pieces = value_generate(g, store, params, start, o, input_token_ids, vocab,
                                         opts.generate);
      frame.insert({act, slot, detokenize(pieces)});
    }
  }
  return frame;
}

}  // namespace wcnslu
