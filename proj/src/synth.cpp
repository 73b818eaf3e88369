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

#include "wcnslu/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "wcnslu/error.hpp"
#include "wcnslu/rng.hpp"

namespace wcnslu {

using nlohmann::json;

namespace {

const char* mode_name(SystemMode m) {
  switch (m) {
    case SystemMode::kAny: return "any";
    case SystemMode::kRequest: return "request";
    case SystemMode::kConfirm: return "confirm";
  }
  return "any";
}

SystemMode parse_mode(const std::string& s) {
  if (s == "any") return SystemMode::kAny;
  if (s == "request") return SystemMode::kRequest;
  if (s == "confirm") return SystemMode::kConfirm;
  throw Error(ErrorCode::kInvalidArgument, "unknown system mode '" + s + "'");
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Placeholder names used by a template, in order of first appearance.
std::vector<std::string> placeholders(const SynthTemplate& t) {
  std::vector<std::string> out;
  auto scan = [&](const std::string& s) {
    for (std::size_t i = s.find('{'); i != std::string::npos; i = s.find('{', i + 1)) {
      const std::size_t j = s.find('}', i);
      if (j == std::string::npos) break;
      std::string name = s.substr(i + 1, j - i - 1);
      if (name != "slot" && std::find(out.begin(), out.end(), name) == out.end()) {
        out.push_back(name);
      }
    }
  };
  scan(t.text);
  for (const Triplet& l : t.labels) {
    scan(l.slot);
    scan(l.value);
  }
  return out;
}

std::string substitute(std::string s, const std::map<std::string, std::string>& binding) {
  for (const auto& [name, value] : binding) {
    const std::string key = "{" + name + "}";
    for (std::size_t i = s.find(key); i != std::string::npos; i = s.find(key, i + value.size())) {
      s.replace(i, key.size(), value);
    }
  }
  return s;
}

struct Instance {
  const SynthTemplate* tmpl = nullptr;
  std::map<std::string, std::string> binding;
  SystemAct system_act;
  std::string key;  // empty for templates without slot values
  bool uses_unseen = false;
};

class Generator {
 public:
  explicit Generator(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed, 0x73796e7468ULL) {
    informable_ = {};
    for (const auto& [slot, vals] : cfg_.values) informable_.push_back(slot);
    // Withheld values: a seeded pick of round(fraction * n) per slot.
    Rng pick = rng_.split(1);
    for (const auto& [slot, vals] : cfg_.values) {
      std::vector<std::string> shuffled = vals;
      pick.shuffle(shuffled);
      const auto n = static_cast<std::size_t>(
          std::llround(cfg_.unseen_value_fraction * static_cast<double>(vals.size())));
      for (std::size_t i = 0; i < std::min(n, vals.size() - 1); ++i) unseen_.insert(shuffled[i]);
    }
    std::set<std::string> pool = {"a", "the", "to", "and", "is", "it", "for", "of", "that",
                                  "in", "what", "want", "there", "place", "town", "i"};
    for (const auto& t : cfg_.templates) {
      for (const auto& w : split_words(t.text)) {
        if (w.find('{') == std::string::npos) pool.insert(w);
      }
    }
    for (const auto& [slot, vals] : cfg_.values) {
      for (const auto& v : vals) {
        if (unseen_.count(v)) continue;
        for (const auto& w : split_words(v)) pool.insert(w);
      }
    }
    filler_.assign(pool.begin(), pool.end());
  }

  SynthSplits run() {
    SynthSplits out;
    out.unseen_values.assign(unseen_.begin(), unseen_.end());
    const std::size_t sizes[3] = {cfg_.n_train, cfg_.n_valid, cfg_.n_test};
    const double total = static_cast<double>(sizes[0] + sizes[1] + sizes[2]);
    Dataset* targets[3] = {&out.train, &out.valid, &out.test};
    const char* names[3] = {"train", "valid", "test"};
    Rng draw = rng_.split(2);
    Rng noise = rng_.split(3);

    // Splits are filled one at a time; each keeps only instantiations whose
    // hash bucket is its own.
    for (std::size_t s = 0; s < 3; ++s) {
      std::size_t attempts = 0;
      const std::size_t limit = 2000 * (sizes[s] + 1);
      while (targets[s]->size() < sizes[s]) {
        const bool want_unseen = s == 2 && !unseen_.empty() &&
                                 draw.uniform() < cfg_.unseen_value_fraction;
        Instance inst;
        do {
          if (++attempts > limit) {
            throw Error(ErrorCode::kInvalidArgument,
                        std::string("template space too small to fill the ") + names[s] + " split");
          }
          inst = sample(draw, want_unseen, s == 0);
        } while (inst.uses_unseen != want_unseen ||
                 (!want_unseen && !inst.key.empty() && bucket(inst.key, sizes, total) != s));
        Example ex = realize(inst, noise);
        char id[32];
        std::snprintf(id, sizeof(id), "%s-%06zu", names[s], targets[s]->size());
        ex.id = id;
        ex.wcn.utterance_id = id;
        targets[s]->push_back(std::move(ex));
      }
    }
    return out;
  }

 private:
  std::size_t bucket(const std::string& key, const std::size_t* sizes, double total) const {
    const std::uint64_t h = splitmix64(fnv1a(key) ^ cfg_.seed);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53 * total;
    if (u < static_cast<double>(sizes[0])) return 0;
    if (u < static_cast<double>(sizes[0] + sizes[1])) return 1;
    return 2;
  }

  const std::string& pick(Rng& rng, const std::vector<std::string>& items) {
    return items[rng.below(items.size())];
  }

  std::string pick_value(Rng& rng, const std::string& slot, bool allow_unseen) {
    const auto& vals = cfg_.values.at(slot);
    if (!allow_unseen) {
      std::vector<std::string> seen;
      for (const auto& v : vals)
        if (!unseen_.count(v)) seen.push_back(v);
      return pick(rng, seen);
    }
    return pick(rng, vals);
  }

  std::string pseudo_word(Rng& rng) {
    static const char* kConsonants = "bdfgklmnprstvz";
    static const char* kVowels = "aeiou";
    std::string w;
    const std::size_t syllables = 2 + rng.below(2);
    for (std::size_t i = 0; i < syllables; ++i) {
      w += kConsonants[rng.below(14)];
      w += kVowels[rng.below(5)];
    }
    return w + kConsonants[rng.below(14)];
  }

  Instance sample(Rng& rng, bool allow_unseen, bool allow_rare) {
    Instance inst;
    inst.tmpl = &cfg_.templates[rng.below(cfg_.templates.size())];
    for (const auto& name : placeholders(*inst.tmpl)) {
      if (!cfg_.values.count(name)) {
        throw Error(ErrorCode::kInvalidArgument, "template uses unknown slot {" + name + "}");
      }
      if (allow_rare && cfg_.rare_value_rate > 0.0 && rng.bernoulli(cfg_.rare_value_rate)) {
        inst.binding[name] = pseudo_word(rng);
      } else {
        inst.binding[name] = pick_value(rng, name, allow_unseen);
      }
      if (unseen_.count(inst.binding[name])) inst.uses_unseen = true;
    }
    switch (inst.tmpl->system) {
      case SystemMode::kAny: {
        static const std::vector<std::vector<Triplet>> pool = {
            {{"welcomemsg", "", ""}},
            {{"request", "food", ""}},
            {{"request", "area", ""}},
            {{"request", "pricerange", ""}},
            {{"reqmore", "", ""}},
            {},
        };
        inst.system_act.triplets = pool[rng.below(pool.size())];
        break;
      }
      case SystemMode::kRequest: {
        const std::string& slot = pick(rng, informable_);
        inst.binding["slot"] = slot;
        inst.system_act.triplets = {{"request", slot, ""}};
        break;
      }
      case SystemMode::kConfirm: {
        const std::string& slot = pick(rng, informable_);
        inst.system_act.triplets = {{"expl-conf", slot, pick_value(rng, slot, false)}};
        break;
      }
    }
    // Splits are disjoint over (template, slot values); templates without
    // values occur in every split.
    std::ostringstream key;
    bool has_values = false;
    key << (inst.tmpl - cfg_.templates.data());
    for (const auto& [k, v] : inst.binding) {
      if (k == "slot") continue;
      key << '|' << k << '=' << v;
      has_values = true;
    }
    if (has_values) inst.key = key.str();
    return inst;
  }

  std::string near_miss(Rng& rng, const std::string& word) {
    static const char* kLetters = "abcdefghijklmnopqrstuvwxyz";
    for (int tries = 0; tries < 8; ++tries) {
      std::string w = word;
      const std::size_t i = rng.below(w.size());
      switch (rng.below(3)) {
        case 0: w[i] = kLetters[rng.below(26)]; break;
        case 1:
          if (w.size() > 2) w.erase(i, 1);
          break;
        default: w.insert(i, 1, kLetters[rng.below(26)]); break;
      }
      if (w != word) return w;
    }
    return word + "s";
  }

  std::string slot_of(const std::string& word) const {
    for (const auto& [slot, vals] : cfg_.values) {
      for (const auto& v : vals) {
        for (const auto& w : split_words(v))
          if (w == word) return slot;
      }
    }
    return "";
  }

  Bin noisy_bin(Rng& rng, const std::string& word, bool allow_unseen) {
    Bin bin;
    if (!rng.bernoulli(cfg_.confusion_rate)) {
      bin.candidates.push_back({word, 1.0});
      return bin;
    }
    const std::size_t k = 1 + rng.below(cfg_.max_distractors);
    std::vector<std::string> words = {word};
    const std::string slot = slot_of(word);
    std::size_t guard = 0;
    while (words.size() < k + 1 && guard++ < 64) {
      std::string d;
      const double u = rng.uniform();
      if (u < cfg_.null_rate) {
        d = "!null";
      } else if (!slot.empty() && rng.bernoulli(0.5)) {
        const std::string v = pick_value(rng, slot, allow_unseen);
        const auto parts = split_words(v);
        d = parts[rng.below(parts.size())];
      } else if (rng.bernoulli(0.5)) {
        d = near_miss(rng, word);
      } else {
        d = pick(rng, filler_);
      }
      if (std::find(words.begin(), words.end(), d) == words.end()) words.push_back(d);
    }
    if (words.size() == 1) {
      bin.candidates.push_back({word, 1.0});
      return bin;
    }
    std::vector<double> post = rng.dirichlet(words.size(), cfg_.concentration);
    const std::size_t top =
        static_cast<std::size_t>(std::max_element(post.begin(), post.end()) - post.begin());
    if (cfg_.informative_noise) {
      if (rng.bernoulli(cfg_.top_prob)) {
        std::swap(post[0], post[top]);
      } else if (top == 0) {
        std::swap(post[0], post[1 + rng.below(post.size() - 1)]);
      }
    }
    for (std::size_t i = 0; i < words.size(); ++i) bin.candidates.push_back({words[i], post[i]});
    std::stable_sort(bin.candidates.begin(), bin.candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       if (a.posterior != b.posterior) return a.posterior > b.posterior;
                       return a.word < b.word;
                     });
    return bin;
  }

  Example realize(const Instance& inst, Rng& rng) {
    Example ex;
    ex.system_act = inst.system_act;
    for (const Triplet& l : inst.tmpl->labels) {
      ex.labels.insert({l.act, substitute(l.slot, inst.binding), substitute(l.value, inst.binding)});
    }
    const auto words = split_words(substitute(inst.tmpl->text, inst.binding));
    static const std::vector<std::string> kFillers = {"um", "uh", "er", "hmm"};
    for (const auto& w : words) {
      if (rng.bernoulli(cfg_.interjection_rate)) {
        ex.wcn.bins.push_back({{{pick(rng, kFillers), 1.0}}});
      }
      ex.wcn.bins.push_back(noisy_bin(rng, w, inst.uses_unseen));
    }
    return ex;
  }

  const SynthConfig& cfg_;
  Rng rng_;
  std::vector<std::string> informable_;
  std::set<std::string> unseen_;
  std::vector<std::string> filler_;
};

}  // namespace

std::map<std::string, std::vector<std::string>> SynthConfig::default_values() {
  return {
      {"food",
       {"chinese", "italian", "indian", "french", "thai", "british", "korean", "spanish",
        "japanese", "mexican", "turkish", "vietnamese", "greek", "portuguese", "lebanese",
        "modern european", "north american", "asian oriental"}},
      {"area", {"north", "south", "east", "west", "centre"}},
      {"pricerange", {"cheap", "moderate", "expensive"}},
  };
}

std::vector<SynthTemplate> SynthConfig::default_templates() {
  using M = SystemMode;
  const Triplet food{"inform", "food", "{food}"};
  const Triplet area{"inform", "area", "{area}"};
  const Triplet price{"inform", "pricerange", "{pricerange}"};
  return {
      {"i want {food} food", {food}, M::kAny},
      {"{food} food", {food}, M::kAny},
      {"looking for a {food} restaurant", {food}, M::kAny},
      {"{food}", {food}, M::kAny},
      {"in the {area}", {area}, M::kAny},
      {"{area} part of town", {area}, M::kAny},
      {"something in the {area}", {area}, M::kAny},
      {"a {pricerange} restaurant", {price}, M::kAny},
      {"{pricerange} place please", {price}, M::kAny},
      {"i want a {pricerange} {food} restaurant", {price, food}, M::kAny},
      {"{food} food in the {area}", {food, area}, M::kAny},
      {"{pricerange} restaurant in the {area} part of town", {price, area}, M::kAny},
      {"what is the phone number", {{"request", "phone", ""}}, M::kAny},
      {"can i have the address", {{"request", "address", ""}}, M::kAny},
      {"whats the post code", {{"request", "postcode", ""}}, M::kAny},
      {"what type of food do they serve", {{"request", "food", ""}}, M::kAny},
      {"what area is it in", {{"request", "area", ""}}, M::kAny},
      {"what is the price range", {{"request", "pricerange", ""}}, M::kAny},
      {"{food} food and the phone number", {food, {"request", "phone", ""}}, M::kAny},
      {"yes", {{"affirm", "", ""}}, M::kConfirm},
      {"yes {food} food", {{"affirm", "", ""}, food}, M::kConfirm},
      {"no", {{"negate", "", ""}}, M::kConfirm},
      {"no in the {area}", {{"negate", "", ""}, area}, M::kConfirm},
      {"i dont care", {{"inform", "{slot}", "dontcare"}}, M::kRequest},
      {"any", {{"inform", "{slot}", "dontcare"}}, M::kRequest},
      {"thank you", {{"thankyou", "", ""}}, M::kAny},
      {"thank you good bye", {{"thankyou", "", ""}, {"bye", "", ""}}, M::kAny},
      {"good bye", {{"bye", "", ""}}, M::kAny},
      {"is there anything else", {{"reqalts", "", ""}}, M::kAny},
      {"how about {food} food", {{"reqalts", "", ""}, food}, M::kAny},
      {"is it {pricerange}", {{"confirm", "pricerange", "{pricerange}"}}, M::kAny},
      {"hello", {{"hello", "", ""}}, M::kAny},
  };
}

void SynthConfig::validate() const {
  auto rate = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must lie in [0,1]");
    }
  };
  rate(confusion_rate, "confusion_rate");
  rate(top_prob, "top_prob");
  rate(interjection_rate, "interjection_rate");
  rate(null_rate, "null_rate");
  rate(unseen_value_fraction, "unseen_value_fraction");
  rate(rare_value_rate, "rare_value_rate");
  if (unseen_value_fraction >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "unseen_value_fraction must be below 1");
  }
  if (n_train == 0) throw Error(ErrorCode::kInvalidArgument, "n_train must be >= 1");
  if (max_distractors == 0) throw Error(ErrorCode::kInvalidArgument, "max_distractors must be >= 1");
  if (!(concentration > 0.0)) throw Error(ErrorCode::kInvalidArgument, "concentration must be positive");
  if (templates.empty()) throw Error(ErrorCode::kInvalidArgument, "no templates");
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "no slot values");
  for (const auto& [slot, vals] : values) {
    if (vals.empty()) throw Error(ErrorCode::kInvalidArgument, "slot " + slot + " has no values");
  }
}

void to_json(json& j, const SynthConfig& c) {
  json templates = json::array();
  for (const auto& t : c.templates) {
    json labels = json::array();
    for (const auto& l : t.labels) labels.push_back({l.act, l.slot, l.value});
    templates.push_back({{"text", t.text}, {"labels", labels}, {"system", mode_name(t.system)}});
  }
  j = json{{"values", c.values},
           {"templates", templates},
           {"n_train", c.n_train},
           {"n_valid", c.n_valid},
           {"n_test", c.n_test},
           {"confusion_rate", c.confusion_rate},
           {"max_distractors", c.max_distractors},
           {"concentration", c.concentration},
           {"informative_noise", c.informative_noise},
           {"top_prob", c.top_prob},
           {"interjection_rate", c.interjection_rate},
           {"null_rate", c.null_rate},
           {"unseen_value_fraction", c.unseen_value_fraction},
           {"rare_value_rate", c.rare_value_rate},
           {"seed", c.seed}};
}

void from_json(const json& j, SynthConfig& c) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "synth config must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "values") {
      c.values = v.get<std::map<std::string, std::vector<std::string>>>();
    } else if (key == "templates") {
      c.templates.clear();
      for (const auto& t : v) {
        SynthTemplate st;
        st.text = t.at("text").get<std::string>();
        for (const auto& l : t.at("labels")) {
          const auto parts = l.get<std::vector<std::string>>();
          st.labels.push_back({parts.size() > 0 ? parts[0] : "", parts.size() > 1 ? parts[1] : "",
                               parts.size() > 2 ? parts[2] : ""});
        }
        st.system = parse_mode(t.value("system", "any"));
        c.templates.push_back(std::move(st));
      }
    } else if (key == "n_train" || key == "n") {
      c.n_train = v.get<std::size_t>();
    } else if (key == "n_valid") {
      c.n_valid = v.get<std::size_t>();
    } else if (key == "n_test") {
      c.n_test = v.get<std::size_t>();
    } else if (key == "confusion_rate") {
      c.confusion_rate = v.get<double>();
    } else if (key == "max_distractors") {
      c.max_distractors = v.get<std::size_t>();
    } else if (key == "concentration") {
      c.concentration = v.get<double>();
    } else if (key == "informative_noise") {
      c.informative_noise = v.get<bool>();
    } else if (key == "top_prob") {
      c.top_prob = v.get<double>();
    } else if (key == "interjection_rate") {
      c.interjection_rate = v.get<double>();
    } else if (key == "null_rate") {
      c.null_rate = v.get<double>();
    } else if (key == "unseen_value_fraction") {
      c.unseen_value_fraction = v.get<double>();
    } else if (key == "rare_value_rate") {
      c.rare_value_rate = v.get<double>();
    } else if (key == "seed") {
      c.seed = v.get<std::uint64_t>();
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown synth config key '" + key + "'");
    }
  }
}

SynthSplits generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  return Generator(cfg).run();
}

}  // namespace wcnslu
