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
#include <set>
#include <string>
#include <vector>

#include "wcnslu/frame.hpp"

namespace wcnslu {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision() const;
  double recall() const;
  // 2PR / (P + R), 0 when undefined.
  double f1() const;
};

struct EvalReport {
  Counts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double utterance_accuracy = 0.0;
  std::size_t utterances = 0;
};

// Micro-averaged triplet scores over case-normalized frames. Throws
// LengthMismatch when the lists differ in length.
EvalReport evaluate(const std::vector<SemanticFrame>& preds,
                    const std::vector<SemanticFrame>& golds);

struct PartitionReport {
  Counts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t gold = 0;
  // Set when the partition has no gold triplets, so recall is a 0/0.
  bool empty = false;
};

struct SeenUnseenReport {
  PartitionReport seen;
  PartitionReport unseen;
};

// Splits gold and predicted triplets by membership in the training triplets
// and scores each partition separately.
SeenUnseenReport seen_unseen_report(const std::vector<SemanticFrame>& preds,
                                    const std::vector<SemanticFrame>& golds,
                                    const std::set<Triplet>& train_triplets);

std::string report_to_json(const EvalReport& report, const SeenUnseenReport* partitions = nullptr);

}  // namespace wcnslu
