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

#include "wcnslu/wcnslu.h"

#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <memory>
#include <new>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "wcnslu/checkpoint.hpp"
#include "wcnslu/data.hpp"
#include "wcnslu/error.hpp"
#include "wcnslu/eval.hpp"
#include "wcnslu/oracle_suite.hpp"
#include "wcnslu/synth.hpp"
#include "wcnslu/train.hpp"

using nlohmann::json;

struct slu_dataset {
  wcnslu::Dataset data;
};

struct slu_vocab {
  wcnslu::Vocab vocab;
};

struct slu_model {
  std::unique_ptr<wcnslu::SluModel> model;
  wcnslu::CheckpointInfo info;
};

namespace {

thread_local std::string g_last_error;

slu_status to_status(wcnslu::ErrorCode code) {
  using wcnslu::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return SLU_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo: return SLU_ERR_IO;
    case ErrorCode::kParse: return SLU_ERR_PARSE;
    case ErrorCode::kInvalidProbability: return SLU_ERR_INVALID_PROBABILITY;
    case ErrorCode::kInvalidWcn: return SLU_ERR_INVALID_WCN;
    case ErrorCode::kAllBinsPruned: return SLU_ERR_ALL_BINS_PRUNED;
    case ErrorCode::kEmptyInput: return SLU_ERR_EMPTY_INPUT;
    case ErrorCode::kShapeMismatch: return SLU_ERR_SHAPE_MISMATCH;
    case ErrorCode::kIndexOutOfRange: return SLU_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::kNonFiniteValue: return SLU_ERR_NON_FINITE;
    case ErrorCode::kCorpusEmpty: return SLU_ERR_CORPUS_EMPTY;
    case ErrorCode::kEmptyLabels: return SLU_ERR_EMPTY_LABELS;
    case ErrorCode::kUnknownActOrSlot: return SLU_ERR_UNKNOWN_ACT_OR_SLOT;
    case ErrorCode::kDegenerateInput: return SLU_ERR_DEGENERATE_INPUT;
    case ErrorCode::kLengthMismatch: return SLU_ERR_LENGTH_MISMATCH;
  }
  return SLU_ERR_INTERNAL;
}

slu_status fail(slu_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body and converts any exception into a status code.
template <typename F>
slu_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return SLU_OK;
  } catch (const wcnslu::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const json::parse_error& e) {
    return fail(SLU_ERR_PARSE, e.what());
  } catch (const json::exception& e) {
    return fail(SLU_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SLU_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SLU_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SLU_ERR_INTERNAL, "unknown failure");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw wcnslu::Error(wcnslu::ErrorCode::kInvalidArgument, what);
}

json parse_config(const char* text) {
  if (!text || !*text) return json::object();
  json j = json::parse(text);
  require(j.is_object(), "configuration must be a JSON object");
  return j;
}

std::vector<wcnslu::SemanticFrame> labels_of(const wcnslu::Dataset& data) {
  std::vector<wcnslu::SemanticFrame> out;
  for (const auto& ex : data) out.push_back(ex.labels);
  return out;
}

std::set<wcnslu::Triplet> triplets_of(const wcnslu::Dataset& data) {
  std::set<wcnslu::Triplet> out;
  for (const auto& ex : data)
    for (const auto& t : ex.labels.triplets) out.insert(wcnslu::normalize(t));
  return out;
}

std::string role_name(wcnslu::TokenRole role) {
  switch (role) {
    case wcnslu::TokenRole::kCls: return "cls";
    case wcnslu::TokenRole::kWcn: return "wcn";
    case wcnslu::TokenRole::kSep1: return "sep";
    case wcnslu::TokenRole::kSystemAct: return "act";
    case wcnslu::TokenRole::kSep2: return "sep";
  }
  return "?";
}

}  // namespace

extern "C" {

const char* slu_version(void) { return "0.1.0"; }

const char* slu_status_string(slu_status status) {
  switch (status) {
    case SLU_OK: return "ok";
    case SLU_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SLU_ERR_IO: return "i/o error";
    case SLU_ERR_PARSE: return "parse error";
    case SLU_ERR_INVALID_PROBABILITY: return "invalid probability";
    case SLU_ERR_INVALID_WCN: return "invalid confusion network";
    case SLU_ERR_ALL_BINS_PRUNED: return "all bins pruned";
    case SLU_ERR_EMPTY_INPUT: return "empty input";
    case SLU_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case SLU_ERR_INDEX_OUT_OF_RANGE: return "index out of range";
    case SLU_ERR_NON_FINITE: return "non-finite value";
    case SLU_ERR_CORPUS_EMPTY: return "empty corpus";
    case SLU_ERR_EMPTY_LABELS: return "empty labels";
    case SLU_ERR_UNKNOWN_ACT_OR_SLOT: return "unknown act or slot";
    case SLU_ERR_DEGENERATE_INPUT: return "degenerate input";
    case SLU_ERR_LENGTH_MISMATCH: return "length mismatch";
    case SLU_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* slu_last_error(void) { return g_last_error.c_str(); }

void slu_string_free(char* s) { std::free(s); }

slu_status slu_dataset_load(const char* path, slu_dataset** out) {
  return guarded([&] {
    require(path && out, "slu_dataset_load: null argument");
    auto ds = std::make_unique<slu_dataset>();
    ds->data = wcnslu::load_dataset(path);
    *out = ds.release();
  });
}

slu_status slu_dataset_save(const slu_dataset* data, const char* path) {
  return guarded([&] {
    require(data && path, "slu_dataset_save: null argument");
    wcnslu::save_dataset(data->data, path);
  });
}

size_t slu_dataset_size(const slu_dataset* data) { return data ? data->data.size() : 0; }

slu_status slu_dataset_find(const slu_dataset* data, const char* id, size_t* index) {
  return guarded([&] {
    require(data && id && index, "slu_dataset_find: null argument");
    for (size_t i = 0; i < data->data.size(); ++i) {
      if (data->data[i].id == id) {
        *index = i;
        return;
      }
    }
    throw wcnslu::Error(wcnslu::ErrorCode::kIndexOutOfRange, std::string("no record with id ") + id);
  });
}

void slu_dataset_free(slu_dataset* data) { delete data; }

slu_status slu_synth_generate(const char* config_json, slu_dataset** train, slu_dataset** valid,
                              slu_dataset** test) {
  return guarded([&] {
    require(train && valid && test, "slu_synth_generate: null argument");
    const wcnslu::SynthConfig cfg = parse_config(config_json).get<wcnslu::SynthConfig>();
    wcnslu::SynthSplits splits = wcnslu::generate_synthetic(cfg);
    auto tr = std::make_unique<slu_dataset>();
    auto va = std::make_unique<slu_dataset>();
    auto te = std::make_unique<slu_dataset>();
    tr->data = std::move(splits.train);
    va->data = std::move(splits.valid);
    te->data = std::move(splits.test);
    *train = tr.release();
    *valid = va.release();
    *test = te.release();
  });
}

slu_status slu_vocab_build(const slu_dataset* const* sets, size_t n_sets, size_t max_size,
                           size_t min_freq, slu_vocab** out) {
  return guarded([&] {
    require(sets && out && n_sets > 0, "slu_vocab_build: null argument");
    std::vector<const wcnslu::Dataset*> inputs;
    for (size_t i = 0; i < n_sets; ++i) {
      require(sets[i] != nullptr, "slu_vocab_build: null dataset");
      inputs.push_back(&sets[i]->data);
    }
    auto v = std::make_unique<slu_vocab>();
    v->vocab = wcnslu::build_vocab_from(inputs, wcnslu::default_name_split_map(), max_size,
                                        min_freq);
    *out = v.release();
  });
}

slu_status slu_vocab_load(const char* path, slu_vocab** out) {
  return guarded([&] {
    require(path && out, "slu_vocab_load: null argument");
    auto v = std::make_unique<slu_vocab>();
    v->vocab = wcnslu::Vocab::load(path);
    *out = v.release();
  });
}

slu_status slu_vocab_save(const slu_vocab* vocab, const char* path) {
  return guarded([&] {
    require(vocab && path, "slu_vocab_save: null argument");
    vocab->vocab.save(path);
  });
}

size_t slu_vocab_size(const slu_vocab* vocab) { return vocab ? vocab->vocab.size() : 0; }

void slu_vocab_free(slu_vocab* vocab) { delete vocab; }

slu_status slu_train(const slu_dataset* train, const slu_dataset* valid, const slu_vocab* vocab,
                     const char* config_json, const char* log_path, slu_epoch_callback callback,
                     void* user, slu_model** out, double* best_valid_f1) {
  return guarded([&] {
    require(train && valid && vocab && out, "slu_train: null argument");
    const wcnslu::TrainConfig cfg = parse_config(config_json).get<wcnslu::TrainConfig>();
    wcnslu::EpochCallback on_epoch;
    if (callback) {
      on_epoch = [&](const wcnslu::EpochLog& e) {
        const std::string line = json{{"epoch", e.epoch},
                                      {"train_loss", e.train_loss},
                                      {"valid_f1", e.valid_f1},
                                      {"valid_acc", e.valid_acc},
                                      {"lr", e.lr}}
                                     .dump();
        callback(line.c_str(), user);
      };
    }
    wcnslu::TrainResult result = wcnslu::train(cfg, train->data, valid->data, vocab->vocab,
                                               log_path ? log_path : "", on_epoch);
    auto m = std::make_unique<slu_model>();
    m->model = std::move(result.model);
    m->info.best_valid_f1 = result.best_valid_f1;
    m->info.train_config = cfg;
    m->info.train_config["best_epoch"] = result.best_epoch;
    m->info.train_config["skipped_examples"] = result.skipped;
    if (best_valid_f1) *best_valid_f1 = result.best_valid_f1;
    *out = m.release();
  });
}

slu_status slu_model_save(const slu_model* model, const char* dir) {
  return guarded([&] {
    require(model && dir, "slu_model_save: null argument");
    wcnslu::save_checkpoint(*model->model, model->info, dir);
  });
}

slu_status slu_model_load(const char* dir, slu_model** out) {
  return guarded([&] {
    require(dir && out, "slu_model_load: null argument");
    wcnslu::LoadedCheckpoint ck = wcnslu::load_checkpoint(dir);
    auto m = std::make_unique<slu_model>();
    m->model = std::move(ck.model);
    m->info = std::move(ck.info);
    *out = m.release();
  });
}

slu_status slu_model_info(const slu_model* model, char** json_out) {
  return guarded([&] {
    require(model && json_out, "slu_model_info: null argument");
    const auto& m = *model->model;
    json j = {{"model_config", m.config()},
              {"train_config", model->info.train_config},
              {"best_valid_f1", model->info.best_valid_f1},
              {"parameters", m.params().total_elements()},
              {"tensors", m.params().size()},
              {"vocab_size", m.vocab().size()},
              {"acts", m.ontology().acts()},
              {"slots", m.ontology().slots()}};
    *json_out = copy_string(j.dump(2));
  });
}

void slu_model_free(slu_model* model) { delete model; }

slu_status slu_predict(const slu_model* model, const slu_dataset* data, size_t threads,
                       char** jsonl_out) {
  return guarded([&] {
    require(model && data && jsonl_out, "slu_predict: null argument");
    const auto frames = wcnslu::predict_all(*model->model, data->data, threads ? threads : 1);
    std::vector<std::string> ids;
    for (const auto& ex : data->data) ids.push_back(ex.id);
    *jsonl_out = copy_string(wcnslu::frames_to_jsonl(ids, frames));
  });
}

slu_status slu_evaluate_files(const char* pred_path, const char* gold_path, const char* train_path,
                              char** json_out) {
  return guarded([&] {
    require(pred_path && gold_path && json_out, "slu_evaluate_files: null argument");
    const auto preds = wcnslu::load_frames(pred_path);
    const auto golds = wcnslu::load_frames(gold_path);
    std::vector<wcnslu::SemanticFrame> p, g;
    if (preds.size() == golds.size()) {
      for (size_t i = 0; i < preds.size(); ++i) {
        if (!preds[i].first.empty() && !golds[i].first.empty() &&
            preds[i].first != golds[i].first) {
          throw wcnslu::Error(wcnslu::ErrorCode::kInvalidArgument,
                              "record " + std::to_string(i + 1) + ": prediction id " +
                                  preds[i].first + " does not match gold id " + golds[i].first);
        }
      }
    }
    for (const auto& [id, f] : preds) p.push_back(f);
    for (const auto& [id, f] : golds) g.push_back(f);
    const wcnslu::EvalReport report = wcnslu::evaluate(p, g);
    if (train_path) {
      const auto partitions =
          wcnslu::seen_unseen_report(p, g, triplets_of(wcnslu::load_dataset(train_path)));
      *json_out = copy_string(wcnslu::report_to_json(report, &partitions));
    } else {
      *json_out = copy_string(wcnslu::report_to_json(report));
    }
  });
}

slu_status slu_evaluate_model(const slu_model* model, const slu_dataset* test,
                              const slu_dataset* train, size_t threads, char** json_out) {
  return guarded([&] {
    require(model && test && json_out, "slu_evaluate_model: null argument");
    const auto preds = wcnslu::predict_all(*model->model, test->data, threads ? threads : 1);
    const auto golds = labels_of(test->data);
    const wcnslu::EvalReport report = wcnslu::evaluate(preds, golds);
    if (train) {
      const auto partitions = wcnslu::seen_unseen_report(preds, golds, triplets_of(train->data));
      *json_out = copy_string(wcnslu::report_to_json(report, &partitions));
    } else {
      *json_out = copy_string(wcnslu::report_to_json(report));
    }
  });
}

slu_status slu_gradcheck(double tolerance, double step, uint64_t seed, char** json_out,
                         int* passed) {
  return guarded([&] {
    require(json_out && passed, "slu_gradcheck: null argument");
    wcnslu::OracleSuiteOptions opts;
    opts.tolerance = tolerance;
    opts.step = step;
    opts.seed = seed;
    const auto results = wcnslu::run_oracle_suite(opts);
    json checks = json::array();
    bool ok = true;
    for (const auto& r : results) {
      ok = ok && r.report.passed;
      checks.push_back({{"name", r.name},
                        {"passed", r.report.passed},
                        {"max_rel_error", r.report.max_rel_error},
                        {"max_abs_error", r.report.max_abs_error},
                        {"coordinates", r.report.coordinates},
                        {"worst", r.report.worst}});
    }
    json j = {{"tolerance", tolerance}, {"step", step}, {"passed", ok}, {"checks", checks}};
    *json_out = copy_string(j.dump(2));
    *passed = ok ? 1 : 0;
  });
}

slu_status slu_inspect(const slu_dataset* data, size_t index, const slu_vocab* vocab,
                       const char* options_json, char** text_out) {
  return guarded([&] {
    require(data && vocab && text_out, "slu_inspect: null argument");
    if (index >= data->data.size()) {
      throw wcnslu::Error(wcnslu::ErrorCode::kIndexOutOfRange, "record index out of range");
    }
    const json opts = parse_config(options_json);
    wcnslu::PruneConfig prune;
    prune.prob_threshold = opts.value("prune_threshold", prune.prob_threshold);
    if (opts.contains("interjections")) {
      const auto words = opts["interjections"].get<std::vector<std::string>>();
      prune.interjections = std::set<std::string>(words.begin(), words.end());
    }
    wcnslu::AssembleOptions assemble;
    assemble.include_system_act = opts.value("use_system_act", true);

    const wcnslu::Example& ex = data->data[index];
    std::ostringstream out;
    out << std::setprecision(6);
    out << "id: " << ex.id << "\n";
    out << "system act:";
    if (ex.system_act.triplets.empty()) out << " (none)";
    for (const auto& t : ex.system_act.triplets) out << " " << t.to_string();
    out << "\nlabels:";
    for (const auto& t : ex.labels.triplets) out << " " << t.to_string();
    out << "\n\nraw network (" << ex.wcn.bins.size() << " bins)\n";
    for (size_t m = 0; m < ex.wcn.bins.size(); ++m) {
      out << "  bin " << m << ":";
      for (const auto& c : ex.wcn.bins[m].candidates) out << "  " << c.word << "/" << c.posterior;
      out << "\n";
    }
    const wcnslu::WordConfusionNetwork pruned = wcnslu::prune_wcn(ex.wcn, prune);
    out << "\npruned network (" << pruned.bins.size() << " bins, threshold "
        << prune.prob_threshold << ")\n";
    for (size_t m = 0; m < pruned.bins.size(); ++m) {
      out << "  bin " << m << ":";
      for (const auto& c : pruned.bins[m].candidates) out << "  " << c.word << "/" << c.posterior;
      out << "\n";
    }
    out << "\nflattened words:";
    for (const auto& w : wcnslu::flatten_wcn(pruned)) out << " " << w.word << "@" << w.bin;
    const wcnslu::EncodedInput in = wcnslu::assemble_input(
        pruned, ex.system_act, vocab->vocab, wcnslu::default_name_split_map(), assemble);
    out << "\n\ninput tokens (T = " << in.length() << ", T' = " << in.t_prime() << ")\n";
    out << "  " << std::left << std::setw(4) << "i" << std::setw(16) << "token" << std::setw(6)
        << "id" << std::setw(5) << "pos" << std::setw(5) << "seg" << std::setw(10) << "prob"
        << "role\n";
    for (size_t t = 0; t < in.length(); ++t) {
      out << "  " << std::setw(4) << t << std::setw(16) << in.tokens[t] << std::setw(6)
          << in.token_ids[t] << std::setw(5) << in.position_ids[t] << std::setw(5)
          << in.segment_ids[t] << std::setw(10) << in.probs[t] << role_name(in.groups[t].role);
      if (in.groups[t].role == wcnslu::TokenRole::kWcn) out << " bin " << in.groups[t].bin;
      out << "\n";
    }
    *text_out = copy_string(out.str());
  });
}

}  // extern "C"
