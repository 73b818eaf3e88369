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

#include "wcnslu/params.hpp"

#include <cmath>

#include "wcnslu/error.hpp"

namespace wcnslu {

ParamId ParamStore::add(std::string name, Tensor init, bool decay) {
  if (by_name_.count(name)) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate parameter name " + name);
  }
  const ParamId id = params_.size();
  by_name_.emplace(name, id);
  params_.push_back(Parameter{std::move(name), std::move(init), decay});
  return id;
}

std::optional<ParamId> ParamStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t ParamStore::total_elements() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::copy_values_from(const ParamStore& other) {
  if (other.size() != size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter store layouts differ");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].value.same_shape(other.params_[i].value)) {
      throw Error(ErrorCode::kShapeMismatch, "parameter " + params_[i].name + " shape differs");
    }
    params_[i].value = other.params_[i].value;
  }
}

GradBuffer::GradBuffer(const ParamStore& store) { reset(store); }

void GradBuffer::reset(const ParamStore& store) {
  grads_.assign(store.size(), Tensor());
  shapes_.resize(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) shapes_[i] = store[i].value.shape();
}

void GradBuffer::zero() {
  for (auto& g : grads_) {
    if (!g.empty()) g.fill(0.0);
  }
}

Tensor& GradBuffer::slot(ParamId id) {
  Tensor& g = grads_.at(id);
  if (g.empty() && shapes_[id][0] * shapes_[id][1] > 0) {
    g = Tensor(shapes_[id][0], shapes_[id][1]);
  }
  return g;
}

const Tensor* GradBuffer::get(ParamId id) const {
  const Tensor& g = grads_.at(id);
  return g.empty() ? nullptr : &g;
}

void GradBuffer::accumulate(const GradBuffer& other, double scale) {
  if (other.grads_.size() != grads_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "gradient buffer layouts differ");
  }
  for (std::size_t i = 0; i < grads_.size(); ++i) {
    if (other.grads_[i].empty()) continue;
    slot(i).add_scaled(other.grads_[i], scale);
  }
}

void GradBuffer::scale(double s) {
  for (auto& g : grads_) {
    for (double& v : g.values()) v *= s;
  }
}

double GradBuffer::global_norm() const {
  double sq = 0.0;
  for (const auto& g : grads_) sq += g.squared_norm();
  return std::sqrt(sq);
}

bool GradBuffer::all_finite(std::string* offending, const ParamStore* store) const {
  for (std::size_t i = 0; i < grads_.size(); ++i) {
    if (!grads_[i].all_finite()) {
      if (offending) *offending = store ? (*store)[i].name : std::to_string(i);
      return false;
    }
  }
  return true;
}

}  // namespace wcnslu
