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

#include "wcnslu/autograd.hpp"
#include "wcnslu/wcn.hpp"

namespace wcnslu {

struct PoolParams {
  ParamId wa = 0;   // d x d
  ParamId ba = 0;   // 1 x d
  ParamId vbar = 0; // 1 x d

  static PoolParams create(ParamStore& store, std::size_t d_model, Rng& rng);
};

// T' x T matrix mapping token rows to [CLS], one row per bin, [SEP], act
// tokens, [SEP]. A bin row holds P(w) / |sub-words of w| for each sub-word of
// each of its words, so (A o) realizes "average sub-words into words, then sum
// words weighted by posterior". Non-WCN rows copy their token.
Tensor aggregation_matrix(const EncodedInput& input);

// u = A o, T' x d. Throws ShapeMismatch when o does not have one row per token.
Var aggregate_bins(Var o, const EncodedInput& input);

// u' = sum_{t>=2} softmax_t(vbar^T tanh(W_a u_t + b_a)) u_t. The [CLS] row is
// excluded. weights_out, when given, receives the 1 x (T'-1) pooling weights.
// Throws DegenerateInput when u has fewer than two rows.
Var self_attentive_pool(Graph& g, const ParamStore& store, const PoolParams& params, Var u,
                        Tensor* weights_out = nullptr);

// r = concat(u_1, u'), 1 x 2d.
Var utterance_repr(Var cls_state, Var pooled);

}  // namespace wcnslu
