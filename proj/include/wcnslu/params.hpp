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

#include <array>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wcnslu/tensor.hpp"

namespace wcnslu {

struct Parameter {
  std::string name;
  Tensor value;
  // Decoupled weight decay applies only to weight matrices and embedding
  // tables, never to biases, layer-norm gains or the attention bias weights.
  bool decay = true;
};

using ParamId = std::size_t;

// Owns every trainable tensor of a model in registration order. References
// returned by operator[] stay valid for the store's lifetime.
class ParamStore {
 public:
  ParamId add(std::string name, Tensor init, bool decay);

  Parameter& operator[](ParamId id) { return params_[id]; }
  const Parameter& operator[](ParamId id) const { return params_[id]; }
  std::size_t size() const { return params_.size(); }
  std::optional<ParamId> find(const std::string& name) const;
  std::size_t total_elements() const;

  // Copies values (not names) from another store with the same layout.
  void copy_values_from(const ParamStore& other);

 private:
  std::deque<Parameter> params_;
  std::map<std::string, ParamId> by_name_;
};

// Gradients laid out parallel to a ParamStore. Slots stay empty until a
// gradient for that parameter is accumulated.
class GradBuffer {
 public:
  GradBuffer() = default;
  explicit GradBuffer(const ParamStore& store);

  void reset(const ParamStore& store);
  void zero();
  Tensor& slot(ParamId id);
  const Tensor* get(ParamId id) const;
  std::size_t size() const { return grads_.size(); }

  void accumulate(const GradBuffer& other, double scale = 1.0);
  void scale(double s);
  double global_norm() const;
  bool all_finite(std::string* offending = nullptr,
                  const ParamStore* store = nullptr) const;

 private:
  std::vector<Tensor> grads_;
  std::vector<std::array<std::size_t, 2>> shapes_;
};

}  // namespace wcnslu
