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

#include "wcnslu/wcn.hpp"

#include <cmath>
#include <sstream>

#include "wcnslu/error.hpp"

namespace wcnslu {

void WordConfusionNetwork::validate() const {
  if (bins.empty()) throw Error(ErrorCode::kInvalidWcn, "confusion network has no bins");
  for (std::size_t m = 0; m < bins.size(); ++m) {
    const auto& cands = bins[m].candidates;
    if (cands.empty()) {
      throw Error(ErrorCode::kInvalidWcn, "bin " + std::to_string(m) + " has no candidates");
    }
    std::set<std::string> seen;
    for (const auto& c : cands) {
      if (c.word.empty()) {
        throw Error(ErrorCode::kInvalidWcn, "empty word in bin " + std::to_string(m));
      }
      if (!(c.posterior >= 0.0 && c.posterior <= 1.0)) {
        throw Error(ErrorCode::kInvalidProbability,
                    "posterior " + std::to_string(c.posterior) + " of '" + c.word + "' outside [0,1]");
      }
      if (!seen.insert(c.word).second) {
        throw Error(ErrorCode::kInvalidWcn,
                    "duplicate word '" + c.word + "' in bin " + std::to_string(m));
      }
    }
  }
}

std::size_t WordConfusionNetwork::num_candidates() const {
  std::size_t n = 0;
  for (const auto& b : bins) n += b.candidates.size();
  return n;
}

void SystemAct::validate() const {
  for (const auto& t : triplets) {
    if (t.act.empty()) throw Error(ErrorCode::kInvalidArgument, "system act with empty act name");
    if (!t.value.empty() && t.slot.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "system act " + t.act + " has a value but no slot");
    }
  }
}

std::set<std::string> PruneConfig::default_interjections() {
  return {"ah", "eh", "er", "erm", "hm", "hmm", "mm", "oh", "uh", "um"};
}

void PruneConfig::validate() const {
  if (!(prob_threshold >= 0.0 && prob_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "prune threshold must lie in [0,1)");
  }
}

NameSplitMap default_name_split_map() {
  return {
      {"pricerange", {"price", "range"}},
      {"postcode", {"post", "code"}},
      {"reqalts", {"request", "alternatives"}},
      {"reqmore", {"request", "more"}},
      {"confirm-domain", {"confirm", "domain"}},
      {"expl-conf", {"explicit", "confirm"}},
      {"impl-conf", {"implicit", "confirm"}},
      {"canthelp", {"cannot", "help"}},
      {"thankyou", {"thank", "you"}},
      {"welcomemsg", {"welcome", "message"}},
  };
}

WordConfusionNetwork prune_wcn(const WordConfusionNetwork& wcn, const PruneConfig& cfg) {
  cfg.validate();
  WordConfusionNetwork out;
  out.utterance_id = wcn.utterance_id;
  for (const auto& bin : wcn.bins) {
    Bin kept;
    for (const auto& c : bin.candidates) {
      if (c.posterior < cfg.prob_threshold || c.posterior <= 0.0) continue;
      if (c.word == cfg.null_token) continue;
      if (cfg.interjections.count(c.word)) continue;
      kept.candidates.push_back(c);
    }
    if (!kept.candidates.empty()) out.bins.push_back(std::move(kept));
  }
  if (out.bins.empty()) {
    throw Error(ErrorCode::kAllBinsPruned,
                "no bin of '" + wcn.utterance_id + "' survives pruning");
  }
  return out;
}

std::vector<FlatWord> flatten_wcn(const WordConfusionNetwork& wcn) {
  std::vector<FlatWord> out;
  out.reserve(wcn.num_candidates());
  for (std::size_t m = 0; m < wcn.bins.size(); ++m) {
    for (const auto& c : wcn.bins[m].candidates) out.push_back({c.word, c.posterior, m});
  }
  return out;
}

std::vector<std::string> linearize_system_act(const SystemAct& act, const NameSplitMap& splitter) {
  std::vector<std::string> out;
  auto add_name = [&](const std::string& name) {
    if (name.empty()) return;
    auto it = splitter.find(name);
    if (it != splitter.end()) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    } else {
      out.push_back(name);
    }
  };
  for (const auto& t : act.triplets) {
    add_name(t.act);
    add_name(t.slot);
    std::istringstream words(t.value);
    for (std::string w; words >> w;) out.push_back(w);
  }
  return out;
}

EncodedInput assemble_input(const WordConfusionNetwork& wcn, const SystemAct& act,
                            const Vocab& vocab, const NameSplitMap& splitter,
                            const AssembleOptions& opts) {
  if (wcn.bins.empty()) {
    throw Error(ErrorCode::kEmptyInput, "utterance '" + wcn.utterance_id + "' has no confusion network");
  }
  EncodedInput in;
  in.has_system_act = opts.include_system_act;
  in.num_bins = wcn.bins.size();
  in.words = flatten_wcn(wcn);

  auto push = [&](std::size_t id, std::size_t pos, std::size_t seg, double p, TokenGroup grp) {
    in.token_ids.push_back(id);
    in.position_ids.push_back(pos);
    in.segment_ids.push_back(seg);
    in.probs.push_back(p);
    in.groups.push_back(grp);
    in.tokens.push_back(vocab.token(id));
  };

  push(Vocab::kCls, 0, 0, 1.0, {TokenRole::kCls});
  std::vector<std::size_t> word_index_in_bin(wcn.bins.size(), 0);
  for (std::size_t w = 0; w < in.words.size(); ++w) {
    const FlatWord& fw = in.words[w];
    TokenGroup grp{TokenRole::kWcn, fw.bin, word_index_in_bin[fw.bin]++, w, 0};
    auto ids = vocab.encode_word(fw.word);
    if (ids.empty()) ids.push_back(Vocab::kUnk);
    for (std::size_t id : ids) push(id, fw.bin + 1, 0, fw.posterior, grp);
  }
  std::size_t pos = in.num_bins + 1;
  push(Vocab::kSep, pos++, 0, 1.0, {TokenRole::kSep1});
  if (opts.include_system_act) {
    for (const auto& word : linearize_system_act(act, splitter)) {
      for (std::size_t id : vocab.encode_word(word)) {
        TokenGroup grp{TokenRole::kSystemAct, 0, 0, 0, in.num_act_tokens++};
        push(id, pos++, 1, 1.0, grp);
      }
    }
    push(Vocab::kSep, pos++, 1, 1.0, {TokenRole::kSep2});
  }
  return in;
}

}  // namespace wcnslu
