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

#include "wcnslu/optim.hpp"

#include <cmath>

#include "wcnslu/error.hpp"

namespace wcnslu {

double LrSchedule::lr(std::int64_t step) const {
  const auto warmup = static_cast<std::int64_t>(std::llround(warmup_fraction * static_cast<double>(total_steps)));
  if (step <= 0) return 0.0;
  if (step < warmup) return base_lr * static_cast<double>(step) / static_cast<double>(warmup);
  if (!linear_decay) return base_lr;
  if (step >= total_steps) return 0.0;
  const double remaining = static_cast<double>(total_steps - step);
  const double span = static_cast<double>(total_steps - warmup);
  return span > 0.0 ? base_lr * remaining / span : 0.0;
}

void LrSchedule::validate() const {
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "warmup fraction must be in [0,1)");
  }
  if (base_lr < 0.0) throw Error(ErrorCode::kInvalidArgument, "learning rate must be >= 0");
  if (total_steps < 1) throw Error(ErrorCode::kInvalidArgument, "total steps must be >= 1");
}

void AdamState::init(const ParamStore& params) {
  t = 0;
  m.clear();
  v.clear();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i].value;
    m.emplace_back(p.rows(), p.cols());
    v.emplace_back(p.rows(), p.cols());
  }
}

double clip_global_norm(GradBuffer& grads, double clip_norm) {
  const double norm = grads.global_norm();
  if (clip_norm > 0.0 && norm > clip_norm) grads.scale(clip_norm / norm);
  return norm;
}

AdamStepResult adam_step(ParamStore& params, GradBuffer& grads, AdamState& state,
                         const LrSchedule& schedule, double weight_decay, double clip_norm) {
  if (state.m.size() != params.size()) state.init(params);
  std::string bad;
  if (!grads.all_finite(&bad, &params)) {
    throw Error(ErrorCode::kNonFiniteValue,
                "non-finite gradient for parameter " + bad + " at step " + std::to_string(state.t + 1));
  }
  AdamStepResult result;
  result.grad_norm = clip_global_norm(grads, clip_norm);
  ++state.t;
  result.lr = schedule.lr(state.t);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    const Tensor* g = grads.get(i);
    const double decay = p.decay ? weight_decay : 0.0;
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double gk = g ? (*g)[k] : 0.0;
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * gk;
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * gk * gk;
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      const double w = p.value[k];
      p.value[k] = w - result.lr * (mhat / (std::sqrt(vhat) + state.eps) + decay * w);
    }
  }
  return result;
}

}  // namespace wcnslu
