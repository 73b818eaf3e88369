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
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <unordered_map>

#include "wcnslu/params.hpp"
#include "wcnslu/rng.hpp"
#include "wcnslu/tensor.hpp"

namespace wcnslu {

class Graph;

// Handle to a node of a Graph. Cheap to copy; only valid while its graph is.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  Graph& graph() const { return *graph_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Var(Graph* graph, std::uint32_t id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  std::uint32_t id_ = 0;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so walking the
// tape backwards visits every node after all of its consumers.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, const Tensor& out_grad)>;

  explicit Graph(bool training = false, std::uint64_t seed = 0, std::uint64_t stream = 0);
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Leaf that receives a gradient (used to differentiate w.r.t. inputs).
  Var variable(Tensor value);
  // Leaf bound by reference to a parameter value. Repeated calls for the
  // same id return the same node so gradients are summed in one place.
  Var param(const ParamStore& store, ParamId id);

  const Tensor& value(Var v) const { return node_value(nodes_[v.id()]); }
  // Null when no gradient reached the node.
  const Tensor* grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }

  void backward(Var scalar_output);
  void accumulate_param_grads(GradBuffer& out) const;

  bool training() const { return training_; }
  Rng& rng() { return rng_; }
  void set_check_finite(bool on) { check_finite_ = on; }
  // With gradients disabled, parameter leaves do not require gradients and
  // no backward closures are recorded (inference).
  void set_grad_enabled(bool on) { grad_enabled_ = on; }

  // For op implementations: records a node whose gradient is propagated by
  // fn. fn is dropped when no input requires a gradient.
  Var emit(Tensor value, std::span<const Var> inputs, BackwardFn fn);
  Var emit(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
    return emit(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
  }
  // Gradient accumulator for a node, allocated on first use; null when the
  // node does not require a gradient.
  Tensor* grad_sink(Var v);
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor owned;
    const Tensor* ext = nullptr;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
    ParamId param = 0;
    bool is_param = false;
  };

  static const Tensor& node_value(const Node& n) { return n.ext ? *n.ext : n.owned; }

  std::deque<Node> nodes_;
  std::unordered_map<ParamId, std::uint32_t> param_nodes_;
  const ParamStore* store_ = nullptr;
  bool training_;
  bool check_finite_ = false;
  bool grad_enabled_ = true;
  Rng rng_;
};

inline const Tensor& Var::value() const { return graph_->value(*this); }

}  // namespace wcnslu
