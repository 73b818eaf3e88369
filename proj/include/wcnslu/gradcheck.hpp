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

#include <functional>
#include <span>
#include <string>

#include "wcnslu/autograd.hpp"

namespace wcnslu {

struct GradCheckOptions {
  double step = 1e-4;
  double tolerance = 1e-4;
  // Denominator floor for the relative error |a - n| / max(|a|, |n|, floor),
  // so near-zero gradients are judged on absolute error.
  double floor = 1e-3;
  // 0 checks every coordinate; otherwise an evenly strided subset.
  std::size_t max_coords_per_tensor = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst;  // "<tensor>[index]" of the largest relative error
  bool passed = true;
};

// Compares the analytic gradient of a scalar function of x against central
// differences (f(x + h e_i) - f(x - h e_i)) / 2h, coordinate by coordinate.
GradCheckReport grad_check(const std::function<Var(Graph&, Var)>& f, const Tensor& x,
                           const GradCheckOptions& opts = {});

// Same comparison against parameters of a store. The loss builder is called
// once per perturbation with a fresh evaluation-mode graph. An empty id list
// checks every parameter.
GradCheckReport grad_check_params(const std::function<Var(Graph&)>& loss, ParamStore& params,
                                  std::span<const ParamId> ids, const GradCheckOptions& opts = {});

}  // namespace wcnslu
