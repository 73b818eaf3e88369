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

#include "wcnslu/autograd.hpp"

#include "wcnslu/error.hpp"

namespace wcnslu {

Graph::Graph(bool training, std::uint64_t seed, std::uint64_t stream)
    : training_(training), rng_(seed, stream) {}

Var Graph::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Graph::variable(Tensor value) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Graph::param(const ParamStore& store, ParamId id) {
  if (store_ && store_ != &store) {
    throw Error(ErrorCode::kInvalidArgument, "graph already bound to another parameter store");
  }
  store_ = &store;
  auto it = param_nodes_.find(id);
  if (it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.ext = &store[id].value;
  n.requires_grad = grad_enabled_;
  n.param = id;
  n.is_param = true;
  nodes_.push_back(std::move(n));
  const auto node_id = static_cast<std::uint32_t>(nodes_.size() - 1);
  param_nodes_.emplace(id, node_id);
  return Var(this, node_id);
}

const Tensor* Graph::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  return n.grad.empty() ? nullptr : &n.grad;
}

Var Graph::emit(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  if (check_finite_ && !value.all_finite()) {
    throw Error(ErrorCode::kNonFiniteValue,
                "non-finite value produced at node " + std::to_string(nodes_.size()));
  }
  Node n;
  n.owned = std::move(value);
  for (const Var& in : inputs) {
    if (nodes_[in.id()].requires_grad) {
      n.requires_grad = true;
      break;
    }
  }
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Tensor* Graph::grad_sink(Var v) {
  Node& n = nodes_[v.id()];
  if (!n.requires_grad) return nullptr;
  if (n.grad.empty()) {
    const Tensor& val = node_value(n);
    n.grad = Tensor(val.rows(), val.cols());
  }
  return &n.grad;
}

void Graph::backward(Var scalar_output) {
  Node& out = nodes_[scalar_output.id()];
  if (node_value(out).size() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "backward() needs a scalar output, got " + node_value(out).shape_string());
  }
  if (!out.requires_grad) return;
  grad_sink(scalar_output)->fill(1.0);
  for (std::size_t i = scalar_output.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.empty()) continue;
    // The closure may append to the grads of earlier nodes only.
    n.backward(*this, n.grad);
  }
}

void Graph::accumulate_param_grads(GradBuffer& out) const {
  for (const auto& [id, node_id] : param_nodes_) {
    const Node& n = nodes_[node_id];
    if (n.grad.empty()) continue;
    out.slot(id).add_scaled(n.grad);
  }
}

}  // namespace wcnslu
