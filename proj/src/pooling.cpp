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

#include "wcnslu/pooling.hpp"

#include <array>

#include "wcnslu/encoder.hpp"
#include "wcnslu/error.hpp"
#include "wcnslu/ops.hpp"

namespace wcnslu {

PoolParams PoolParams::create(ParamStore& store, std::size_t d, Rng& rng) {
  PoolParams p;
  p.wa = store.add("pool.wa", init_weight(d, d, rng), true);
  p.ba = store.add("pool.ba", Tensor(1, d), false);
  p.vbar = store.add("pool.vbar", init_weight(1, d, rng), true);
  return p;
}

Tensor aggregation_matrix(const EncodedInput& input) {
  const std::size_t t = input.length();
  Tensor a(input.t_prime(), t);
  std::vector<std::size_t> pieces(input.words.size(), 0);
  for (const auto& grp : input.groups) {
    if (grp.role == TokenRole::kWcn) ++pieces[grp.flat_word];
  }
  const std::size_t sep1_row = input.num_bins + 1;
  for (std::size_t i = 0; i < t; ++i) {
    const TokenGroup& grp = input.groups[i];
    switch (grp.role) {
      case TokenRole::kCls:
        a(0, i) = 1.0;
        break;
      case TokenRole::kWcn:
        a(1 + grp.bin, i) += input.words[grp.flat_word].posterior /
                             static_cast<double>(pieces[grp.flat_word]);
        break;
      case TokenRole::kSep1:
        a(sep1_row, i) = 1.0;
        break;
      case TokenRole::kSystemAct:
        a(sep1_row + 1 + grp.act_token, i) = 1.0;
        break;
      case TokenRole::kSep2:
        a(sep1_row + 1 + input.num_act_tokens, i) = 1.0;
        break;
    }
  }
  return a;
}

Var aggregate_bins(Var o, const EncodedInput& input) {
  if (o.rows() != input.length()) {
    throw Error(ErrorCode::kShapeMismatch, "encoder output has " + std::to_string(o.rows()) +
                                               " rows for " + std::to_string(input.length()) +
                                               " tokens");
  }
  Graph& g = o.graph();
  return ops::matmul(g.constant(aggregation_matrix(input)), o);
}

Var self_attentive_pool(Graph& g, const ParamStore& store, const PoolParams& params, Var u,
                        Tensor* weights_out) {
  if (u.rows() < 2) {
    throw Error(ErrorCode::kDegenerateInput, "self-attentive pooling needs at least two rows");
  }
  Var rest = ops::slice_rows(u, 1, u.rows() - 1);
  Var hidden = ops::tanh(ops::add_row(ops::matmul(rest, g.param(store, params.wa)),
                                      g.param(store, params.ba)));
  Var scores = ops::transpose(ops::matmul_nt(hidden, g.param(store, params.vbar)));
  Var weights = ops::softmax_rows(scores);
  if (weights_out) *weights_out = weights.value();
  return ops::matmul(weights, rest);
}

Var utterance_repr(Var cls_state, Var pooled) {
  if (cls_state.rows() != 1 || pooled.rows() != 1 || cls_state.cols() != pooled.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "utterance_repr: " + cls_state.value().shape_string() +
                                               " vs " + pooled.value().shape_string());
  }
  const std::array<Var, 2> parts{cls_state, pooled};
  return ops::concat_cols(parts);
}

}  // namespace wcnslu
