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
#include <memory>
#include <string>
#include <vector>

#include "wcnslu/gradcheck.hpp"
#include "wcnslu/model.hpp"

namespace wcnslu {

// Small model and one example used by the gradient oracle: 2 encoder layers,
// d = 16, 2 heads, at most 12 input tokens and a vocabulary under 50 entries.
// Every parameter is redrawn from N(0, 0.3) and every lambda is non-zero so
// no gradient vanishes by construction.
struct ToySetup {
  std::unique_ptr<SluModel> model;
  WordConfusionNetwork wcn;
  SystemAct system_act;
  EncodedInput input;
  SemanticFrame gold;
};

ToySetup make_toy_setup(HeadType head, std::uint64_t seed);

struct OracleResult {
  std::string name;
  GradCheckReport report;
};

struct OracleSuiteOptions {
  double tolerance = 1e-4;
  double step = 1e-4;
  std::uint64_t seed = 0;
};

// Finite-difference checks of every differentiable op and of the full STC
// and HD losses with respect to every model parameter.
std::vector<OracleResult> run_oracle_suite(const OracleSuiteOptions& opts = {});

}  // namespace wcnslu
