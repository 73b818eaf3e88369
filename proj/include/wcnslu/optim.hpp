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
#include <vector>

#include "wcnslu/params.hpp"

namespace wcnslu {

// Linear warmup to base_lr over warmup_fraction * total_steps, then linear
// decay to zero at total_steps. Steps are 1-based update counts.
struct LrSchedule {
  double base_lr = 1e-3;
  double warmup_fraction = 0.1;
  std::int64_t total_steps = 1;
  // When false the rate stays at base_lr after warmup.
  bool linear_decay = true;

  double lr(std::int64_t step) const;
  void validate() const;
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t t = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;

  void init(const ParamStore& params);
};

// Scales every gradient by clip_norm / norm when the global L2 norm exceeds
// clip_norm. Returns the norm measured before clipping.
double clip_global_norm(GradBuffer& grads, double clip_norm);

struct AdamStepResult {
  double lr = 0.0;
  double grad_norm = 0.0;
};

// One AdamW update: clip, bias-corrected Adam with lr(t + 1), then decoupled
// decay (param -= lr * weight_decay * param) on parameters flagged for decay.
// Throws NonFiniteValue naming the parameter if a gradient is NaN/Inf.
AdamStepResult adam_step(ParamStore& params, GradBuffer& grads, AdamState& state,
                         const LrSchedule& schedule, double weight_decay, double clip_norm);

}  // namespace wcnslu
