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

#include "wcnslu/data.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wcnslu/error.hpp"

namespace wcnslu {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

Triplet parse_triplet(const json& j, std::size_t line, const char* field) {
  if (!j.is_array() || j.empty() || j.size() > 3) {
    throw ParseError(ErrorCode::kParse, line,
                     std::string(field) + ": triplet must be an array of 1 to 3 strings");
  }
  std::string parts[3];
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) {
      throw ParseError(ErrorCode::kParse, line, std::string(field) + ": triplet entries must be strings");
    }
    parts[i] = j[i].get<std::string>();
  }
  return {parts[0], parts[1], parts[2]};
}

json triplet_json(const Triplet& t) { return json::array({t.act, t.slot, t.value}); }

Example parse_example(const std::string& text, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(ErrorCode::kParse, line, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(ErrorCode::kParse, line, "record must be an object");
  for (const char* key : {"id", "wcn", "system_act", "labels"}) {
    if (!j.contains(key)) throw ParseError(ErrorCode::kParse, line, std::string("missing field ") + key);
  }
  if (j.size() != 4) throw ParseError(ErrorCode::kParse, line, "unexpected extra fields");

  Example ex;
  if (!j["id"].is_string()) throw ParseError(ErrorCode::kParse, line, "id must be a string");
  ex.id = j["id"].get<std::string>();
  ex.wcn.utterance_id = ex.id;

  const json& bins = j["wcn"];
  if (!bins.is_array()) throw ParseError(ErrorCode::kParse, line, "wcn must be an array of bins");
  for (const json& bin : bins) {
    if (!bin.is_array()) throw ParseError(ErrorCode::kParse, line, "bin must be an array");
    Bin b;
    for (const json& cand : bin) {
      if (!cand.is_array() || cand.size() != 2 || !cand[0].is_string() || !cand[1].is_number()) {
        throw ParseError(ErrorCode::kParse, line, "candidate must be [token, posterior]");
      }
      b.candidates.push_back({cand[0].get<std::string>(), cand[1].get<double>()});
    }
    ex.wcn.bins.push_back(std::move(b));
  }

  const json& act = j["system_act"];
  if (!act.is_array()) throw ParseError(ErrorCode::kParse, line, "system_act must be an array");
  for (const json& t : act) ex.system_act.triplets.push_back(parse_triplet(t, line, "system_act"));

  const json& labels = j["labels"];
  if (!labels.is_array()) throw ParseError(ErrorCode::kParse, line, "labels must be an array");
  for (const json& t : labels) ex.labels.insert(parse_triplet(t, line, "labels"));

  try {
    ex.wcn.validate();
    ex.system_act.validate();
  } catch (const Error& e) {
    throw ParseError(e.code(), line, e.what());
  }
  return ex;
}

}  // namespace

Dataset parse_dataset(const std::string& text) {
  Dataset out;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_example(line, line_no));
  }
  return out;
}

Dataset load_dataset(const std::string& path) { return parse_dataset(read_file(path)); }

std::string example_to_json(const Example& ex) {
  json j = json::object();
  j["id"] = ex.id;
  json bins = json::array();
  for (const Bin& b : ex.wcn.bins) {
    json bin = json::array();
    for (const Candidate& c : b.candidates) bin.push_back(json::array({c.word, c.posterior}));
    bins.push_back(std::move(bin));
  }
  j["wcn"] = std::move(bins);
  json act = json::array();
  for (const Triplet& t : ex.system_act.triplets) act.push_back(triplet_json(t));
  j["system_act"] = std::move(act);
  json labels = json::array();
  for (const Triplet& t : ex.labels.triplets) labels.push_back(triplet_json(t));
  j["labels"] = std::move(labels);
  return j.dump();
}

std::string dataset_to_jsonl(const Dataset& data) {
  std::string out;
  for (const Example& ex : data) {
    out += example_to_json(ex);
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& data, const std::string& path) {
  write_file(path, dataset_to_jsonl(data));
}

std::string frames_to_jsonl(const std::vector<std::string>& ids,
                            const std::vector<SemanticFrame>& frames) {
  if (ids.size() != frames.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ids and frames differ in length");
  }
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    json labels = json::array();
    for (const Triplet& t : frames[i].triplets) labels.push_back(triplet_json(t));
    json j = json::object();
    j["id"] = ids[i];
    j["labels"] = std::move(labels);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, SemanticFrame>> load_frames(const std::string& path) {
  std::vector<std::pair<std::string, SemanticFrame>> out;
  std::istringstream in(read_file(path));
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(ErrorCode::kParse, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("labels") || !j["labels"].is_array()) {
      throw ParseError(ErrorCode::kParse, line_no, "record needs a labels array");
    }
    std::string id;
    if (j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
    SemanticFrame frame;
    for (const json& t : j["labels"]) frame.insert(parse_triplet(t, line_no, "labels"));
    out.emplace_back(std::move(id), std::move(frame));
  }
  return out;
}

Ontology build_ontology(const Dataset& train, const NameSplitMap& split_map) {
  std::map<ActSlot, std::set<std::string>> observed;
  for (const Example& ex : train) {
    for (const Triplet& raw : ex.labels.triplets) {
      const Triplet t = normalize(raw);
      auto& values = observed[{t.act, t.slot}];
      if (!t.value.empty()) values.insert(t.value);
    }
  }
  if (observed.empty()) throw Error(ErrorCode::kEmptyLabels, "training labels are empty");
  return Ontology(observed, split_map);
}

std::map<std::string, std::size_t> count_words(const Dataset& data, const NameSplitMap& split_map) {
  std::map<std::string, std::size_t> counts;
  auto add_text = [&](const std::string& text) {
    std::istringstream words(text);
    for (std::string w; words >> w;) ++counts[to_lower(w)];
  };
  auto add_name = [&](const std::string& name) {
    if (name.empty()) return;
    if (auto it = split_map.find(name); it != split_map.end()) {
      for (const auto& w : it->second) add_text(w);
    } else {
      add_text(name);
    }
  };
  for (const Example& ex : data) {
    for (const Bin& b : ex.wcn.bins)
      for (const Candidate& c : b.candidates) add_text(c.word);
    for (const auto& w : linearize_system_act(ex.system_act, split_map)) add_text(w);
    for (const Triplet& t : ex.labels.triplets) {
      add_name(t.act);
      add_name(t.slot);
      add_text(t.value);
    }
  }
  return counts;
}

Vocab build_vocab_from(const std::vector<const Dataset*>& sets, const NameSplitMap& split_map,
                       std::size_t max_size, std::size_t min_freq) {
  std::map<std::string, std::size_t> counts;
  for (const Dataset* d : sets) {
    for (const auto& [w, c] : count_words(*d, split_map)) counts[w] += c;
  }
  return build_vocab(counts, max_size, min_freq);
}

}  // namespace wcnslu
