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
#include <span>
#include <vector>

#include "wcnslu/autograd.hpp"

// Differentiable kernels. Every op checks operand shapes (ShapeMismatch) and,
// on backward, adds exact analytic gradients into inputs that need them.
namespace wcnslu::ops {

// [n,k] x [k,m] -> [n,m]
Var matmul(Var a, Var b);
// a * b^T: [n,k] x [m,k] -> [n,m]
Var matmul_nt(Var a, Var b);
Var transpose(Var a);

Var add(Var a, Var b);
// Adds a 1 x m row to every row of an n x m input.
Var add_row(Var a, Var bias);
// Adds a constant tensor of the same shape (e.g. an attention mask).
Var add_const(Var a, const Tensor& c);
Var scale(Var a, double factor);
// Elementwise product of equal shapes.
Var mul(Var a, Var b);

Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t start, std::size_t count);
Var slice_rows(Var a, std::size_t start, std::size_t count);
// Embedding lookup: out row i = table row ids[i].
Var gather_rows(Var table, std::span<const std::size_t> ids);
// 1 x m -> n x m
Var repeat_rows(Var a, std::size_t n);
// n x m -> 1 x m
Var mean_rows(Var a);
// Sum of every element -> 1 x 1
Var sum(Var a);

Var softmax_rows(Var a);
Var tanh(Var a);
Var relu(Var a);
Var sigmoid(Var a);
Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-12);
// Inverted dropout; identity when the graph is not training or p == 0.
Var dropout(Var x, double p);

// out[i][j] = s[i][j] + lambda[0][head] * probs[j]
Var add_prob_bias(Var scores, Var lambda, std::size_t head, std::span<const double> probs);

// Sum over rows of -log softmax(logits[i])[targets[i]] -> 1 x 1
Var cross_entropy(Var logits, std::span<const std::size_t> targets);
// Sum over all entries of binary cross-entropy with logits -> 1 x 1
Var bce_with_logits(Var logits, const Tensor& targets);
// Sum over rows of -log(max(probs[i][targets[i]], floor)) -> 1 x 1
Var nll(Var probs, std::span<const std::size_t> targets, double floor = 1e-300);
// Row-wise gate: out[i] = g[i] * a[i] + (1 - g[i]) * b[i], g is n x 1.
Var gate_mix(Var g, Var a, Var b);

}  // namespace wcnslu::ops
