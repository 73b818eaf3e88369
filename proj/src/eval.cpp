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

#include "wcnslu/eval.hpp"

#include "json.hpp"
#include "wcnslu/error.hpp"

namespace wcnslu {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_lengths(const std::vector<SemanticFrame>& preds,
                   const std::vector<SemanticFrame>& golds) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorCode::kLengthMismatch, "got " + std::to_string(preds.size()) +
                                                " predictions for " + std::to_string(golds.size()) +
                                                " gold frames");
  }
}

PartitionReport finish(const Counts& c, std::size_t gold) {
  PartitionReport r;
  r.counts = c;
  r.precision = c.precision();
  r.recall = c.recall();
  r.f1 = c.f1();
  r.gold = gold;
  r.empty = gold == 0;
  return r;
}

nlohmann::json counts_json(const Counts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
}

nlohmann::json partition_json(const PartitionReport& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1},
          {"gold", p.gold},           {"empty", p.empty},   {"counts", counts_json(p.counts)}};
}

}  // namespace

double Counts::precision() const { return ratio(tp, tp + fp); }
double Counts::recall() const { return ratio(tp, tp + fn); }

double Counts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

EvalReport evaluate(const std::vector<SemanticFrame>& preds,
                    const std::vector<SemanticFrame>& golds) {
  check_lengths(preds, golds);
  EvalReport report;
  std::size_t exact = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const SemanticFrame pred = normalize(preds[i]);
    const SemanticFrame gold = normalize(golds[i]);
    for (const Triplet& t : pred.triplets) {
      if (gold.contains(t)) {
        ++report.counts.tp;
      } else {
        ++report.counts.fp;
      }
    }
    for (const Triplet& t : gold.triplets) {
      if (!pred.contains(t)) ++report.counts.fn;
    }
    if (pred == gold) ++exact;
  }
  report.precision = report.counts.precision();
  report.recall = report.counts.recall();
  report.f1 = report.counts.f1();
  report.utterances = preds.size();
  report.utterance_accuracy = ratio(exact, preds.size());
  return report;
}

SeenUnseenReport seen_unseen_report(const std::vector<SemanticFrame>& preds,
                                    const std::vector<SemanticFrame>& golds,
                                    const std::set<Triplet>& train_triplets) {
  check_lengths(preds, golds);
  std::set<Triplet> seen_set;
  for (const Triplet& t : train_triplets) seen_set.insert(normalize(t));
  Counts seen, unseen;
  std::size_t seen_gold = 0, unseen_gold = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const SemanticFrame pred = normalize(preds[i]);
    const SemanticFrame gold = normalize(golds[i]);
    for (const Triplet& t : gold.triplets) {
      const bool is_seen = seen_set.count(t) > 0;
      Counts& c = is_seen ? seen : unseen;
      ++(is_seen ? seen_gold : unseen_gold);
      if (pred.contains(t)) {
        ++c.tp;
      } else {
        ++c.fn;
      }
    }
    for (const Triplet& t : pred.triplets) {
      if (gold.contains(t)) continue;
      ++(seen_set.count(t) ? seen : unseen).fp;
    }
  }
  return {finish(seen, seen_gold), finish(unseen, unseen_gold)};
}

std::string report_to_json(const EvalReport& report, const SeenUnseenReport* partitions) {
  nlohmann::json j = {{"precision", report.precision},
                      {"recall", report.recall},
                      {"f1", report.f1},
                      {"utterance_accuracy", report.utterance_accuracy},
                      {"utterances", report.utterances},
                      {"counts", counts_json(report.counts)}};
  if (partitions) {
    j["seen"] = partition_json(partitions->seen);
    j["unseen"] = partition_json(partitions->unseen);
  }
  return j.dump(2);
}

}  // namespace wcnslu
