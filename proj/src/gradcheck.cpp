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

#include "wcnslu/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wcnslu/error.hpp"

namespace wcnslu {
namespace {

void validate(const GradCheckOptions& opts) {
  if (opts.step < 1e-6 || opts.step > 1e-3) {
    throw Error(ErrorCode::kInvalidArgument, "finite-difference step must lie in [1e-6, 1e-3]");
  }
}

double finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFiniteValue, std::string("non-finite value during ") + what);
  }
  return v;
}

std::vector<std::size_t> coordinates(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (cap == 0 || cap >= n) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
  }
  for (std::size_t k = 0; k < cap; ++k) idx.push_back(k * n / cap);
  return idx;
}

void record(GradCheckReport& rep, double analytic, double numeric, const std::string& where,
            const GradCheckOptions& opts) {
  const double abs_err = std::abs(analytic - numeric);
  const double denom = std::max({std::abs(analytic), std::abs(numeric), opts.floor});
  const double rel = abs_err / denom;
  ++rep.coordinates;
  rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
  if (rel > rep.max_rel_error || rep.worst.empty()) {
    rep.max_rel_error = rel;
    rep.worst = where;
  }
  rep.passed = rep.max_rel_error <= opts.tolerance;
}

}  // namespace

GradCheckReport grad_check(const std::function<Var(Graph&, Var)>& f, const Tensor& x,
                           const GradCheckOptions& opts) {
  validate(opts);
  Tensor analytic;
  {
    Graph g;
    Var xv = g.variable(x);
    Var y = f(g, xv);
    finite(y.value()[0], "analytic pass");
    g.backward(y);
    analytic = g.grad(xv) ? *g.grad(xv) : Tensor(x.rows(), x.cols());
  }
  auto eval = [&](const Tensor& at) {
    Graph g;
    Var y = f(g, g.constant(at));
    return finite(y.value()[0], "finite difference");
  };
  GradCheckReport rep;
  Tensor probe = x;
  for (std::size_t i : coordinates(x.size(), opts.max_coords_per_tensor)) {
    const double orig = probe[i];
    probe[i] = orig + opts.step;
    const double fp = eval(probe);
    probe[i] = orig - opts.step;
    const double fm = eval(probe);
    probe[i] = orig;
    const double numeric = (fp - fm) / (2.0 * opts.step);
    record(rep, analytic[i], numeric, "x[" + std::to_string(i) + "]", opts);
  }
  return rep;
}

GradCheckReport grad_check_params(const std::function<Var(Graph&)>& loss, ParamStore& params,
                                  std::span<const ParamId> ids, const GradCheckOptions& opts) {
  validate(opts);
  std::vector<ParamId> targets(ids.begin(), ids.end());
  if (targets.empty()) {
    targets.resize(params.size());
    std::iota(targets.begin(), targets.end(), 0);
  }
  GradBuffer grads(params);
  {
    Graph g;
    Var y = loss(g);
    finite(y.value()[0], "analytic pass");
    g.backward(y);
    g.accumulate_param_grads(grads);
  }
  auto eval = [&]() {
    Graph g;
    return finite(loss(g).value()[0], "finite difference");
  };
  GradCheckReport rep;
  for (ParamId id : targets) {
    Tensor& value = params[id].value;
    const Tensor* g = grads.get(id);
    for (std::size_t i : coordinates(value.size(), opts.max_coords_per_tensor)) {
      const double orig = value[i];
      value[i] = orig + opts.step;
      const double fp = eval();
      value[i] = orig - opts.step;
      const double fm = eval();
      value[i] = orig;
      const double numeric = (fp - fm) / (2.0 * opts.step);
      record(rep, g ? (*g)[i] : 0.0, numeric, params[id].name + "[" + std::to_string(i) + "]",
             opts);
    }
  }
  return rep;
}

}  // namespace wcnslu
