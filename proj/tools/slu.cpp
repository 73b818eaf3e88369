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

// slu: command-line front end over the wcnslu C interface.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wcnslu/wcnslu.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

// Thrown for failures after argument parsing; carries the message printed
// on stderr.
struct RuntimeFailure {
  std::string message;
};

void check(slu_status status, const std::string& context) {
  if (status != SLU_OK) {
    throw RuntimeFailure{context + ": " + slu_status_string(status) + ": " + slu_last_error()};
  }
}

struct DatasetDeleter {
  void operator()(slu_dataset* d) const { slu_dataset_free(d); }
};
struct VocabDeleter {
  void operator()(slu_vocab* v) const { slu_vocab_free(v); }
};
struct ModelDeleter {
  void operator()(slu_model* m) const { slu_model_free(m); }
};
struct StringDeleter {
  void operator()(char* s) const { slu_string_free(s); }
};
using DatasetPtr = std::unique_ptr<slu_dataset, DatasetDeleter>;
using VocabPtr = std::unique_ptr<slu_vocab, VocabDeleter>;
using ModelPtr = std::unique_ptr<slu_model, ModelDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

DatasetPtr load_dataset(const std::string& path) {
  slu_dataset* d = nullptr;
  check(slu_dataset_load(path.c_str(), &d), "loading " + path);
  return DatasetPtr(d);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure{"cannot open " + path};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw RuntimeFailure{path + ": " + e.what()};
  }
}

std::vector<std::string> read_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure{"cannot open " + path};
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure{"cannot write " + path};
  out << text;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure{"cannot create " + dir + ": " + ec.message()};
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::string config;
  std::size_t n = 2000;
  std::size_t n_valid = 500;
  std::size_t n_test = 500;
  double confusion_rate = 0.3;
  std::size_t max_distractors = 3;
  double concentration = 1.0;
  bool uninformative = false;
  double unseen_fraction = 0.0;
  double rare_value_rate = 0.0;
  std::uint64_t seed = 0;
};

void add_synth(CLI::App& app, SynthArgs& a) {
  auto* cmd = app.add_subcommand("synth", "Generate synthetic train/valid/test JSONL files");
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--config", a.config, "JSON file with generator settings (flags win)");
  cmd->add_option("--n", a.n, "Number of training examples")->capture_default_str();
  cmd->add_option("--n-valid", a.n_valid, "Number of validation examples")->capture_default_str();
  cmd->add_option("--n-test", a.n_test, "Number of test examples")->capture_default_str();
  cmd->add_option("--confusion-rate", a.confusion_rate, "Per-word probability of a noisy bin")
      ->capture_default_str();
  cmd->add_option("--max-distractors", a.max_distractors, "Distractors per noisy bin (upper bound)")
      ->capture_default_str();
  cmd->add_option("--concentration", a.concentration, "Dirichlet concentration of posteriors")
      ->capture_default_str();
  cmd->add_flag("--uninformative", a.uninformative, "Posteriors carry no signal about the correct word");
  cmd->add_option("--unseen-fraction", a.unseen_fraction,
                  "Share of slot values withheld from train/valid")
      ->capture_default_str();
  cmd->add_option("--rare-value-rate", a.rare_value_rate,
                  "Probability of replacing a training value by a one-off pseudo-word")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
}

int run_synth(const CLI::App& cmd, const SynthArgs& a) {
  json cfg = a.config.empty() ? json::object() : read_json_file(a.config);
  auto set = [&](const char* flag, const char* key, const json& value) {
    if (cmd.count(flag) > 0 || !cfg.contains(key)) cfg[key] = value;
  };
  set("--n", "n_train", a.n);
  set("--n-valid", "n_valid", a.n_valid);
  set("--n-test", "n_test", a.n_test);
  set("--confusion-rate", "confusion_rate", a.confusion_rate);
  set("--max-distractors", "max_distractors", a.max_distractors);
  set("--concentration", "concentration", a.concentration);
  set("--uninformative", "informative_noise", !a.uninformative);
  set("--unseen-fraction", "unseen_value_fraction", a.unseen_fraction);
  set("--rare-value-rate", "rare_value_rate", a.rare_value_rate);
  set("--seed", "seed", a.seed);

  slu_dataset *train = nullptr, *valid = nullptr, *test = nullptr;
  check(slu_synth_generate(cfg.dump().c_str(), &train, &valid, &test), "synth");
  DatasetPtr tr(train), va(valid), te(test);
  ensure_dir(a.out);
  const fs::path root(a.out);
  check(slu_dataset_save(tr.get(), (root / "train.jsonl").c_str()), "writing train.jsonl");
  check(slu_dataset_save(va.get(), (root / "valid.jsonl").c_str()), "writing valid.jsonl");
  check(slu_dataset_save(te.get(), (root / "test.jsonl").c_str()), "writing test.jsonl");
  std::cerr << "wrote " << slu_dataset_size(tr.get()) << "/" << slu_dataset_size(va.get()) << "/"
            << slu_dataset_size(te.get()) << " examples to " << a.out << "\n";
  return 0;
}

// --- build-vocab ------------------------------------------------------------

struct VocabArgs {
  std::string data;
  std::vector<std::string> inputs;
  bool all_splits = false;
  std::string out;
  std::size_t max_size = 4000;
  std::size_t min_freq = 1;
  std::uint64_t seed = 0;
};

void add_vocab(CLI::App& app, VocabArgs& a) {
  auto* cmd = app.add_subcommand("build-vocab", "Build a sub-word vocabulary from datasets");
  cmd->add_option("--data", a.data, "Dataset directory (reads train.jsonl)");
  cmd->add_flag("--all-splits", a.all_splits,
                "With --data, also count words of valid.jsonl and test.jsonl");
  cmd->add_option("--input", a.inputs, "Additional JSONL file (repeatable)");
  cmd->add_option("--out", a.out, "Output vocabulary file")->required();
  cmd->add_option("--max-size", a.max_size, "Maximum vocabulary size")->capture_default_str();
  cmd->add_option("--min-freq", a.min_freq, "Minimum word count")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed (construction is deterministic)")
      ->capture_default_str();
}

int run_vocab(const VocabArgs& a) {
  std::vector<std::string> files = a.inputs;
  if (!a.data.empty()) {
    files.push_back((fs::path(a.data) / "train.jsonl").string());
    if (a.all_splits) {
      files.push_back((fs::path(a.data) / "valid.jsonl").string());
      files.push_back((fs::path(a.data) / "test.jsonl").string());
    }
  }
  if (files.empty()) throw RuntimeFailure{"build-vocab needs --data or --input"};
  std::vector<DatasetPtr> sets;
  std::vector<const slu_dataset*> raw;
  for (const auto& f : files) {
    sets.push_back(load_dataset(f));
    raw.push_back(sets.back().get());
  }
  slu_vocab* v = nullptr;
  check(slu_vocab_build(raw.data(), raw.size(), a.max_size, a.min_freq, &v), "build-vocab");
  VocabPtr vocab(v);
  check(slu_vocab_save(vocab.get(), a.out.c_str()), "writing " + a.out);
  std::cerr << "vocabulary of " << slu_vocab_size(vocab.get()) << " tokens written to " << a.out
            << "\n";
  return 0;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string data, train, valid, vocab, out, config, log, interjections, head = "stc";
  bool no_probs = false, cls_only = false, no_system_act = false, quiet = false;
  double prune_threshold = 0.001;
  double lr = 1e-3;
  std::size_t epochs = 50, batch_size = 32, seeds = 1, threads = 1, vocab_size = 4000;
  std::uint64_t seed = 0;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  cmd->add_option("--data", a.data, "Dataset directory with train.jsonl and valid.jsonl");
  cmd->add_option("--train", a.train, "Training JSONL (overrides --data)");
  cmd->add_option("--valid", a.valid, "Validation JSONL (overrides --data)");
  cmd->add_option("--vocab", a.vocab, "Vocabulary file (default: built from the training set)");
  cmd->add_option("--vocab-size", a.vocab_size, "Size limit when the vocabulary is built here")
      ->capture_default_str();
  cmd->add_option("--out", a.out, "Checkpoint directory")->required();
  cmd->add_option("--config", a.config, "JSON file with training/model settings (flags win)");
  cmd->add_option("--log", a.log, "Metrics JSONL (default: <out>/metrics.jsonl)");
  cmd->add_option("--head", a.head, "Output head")
      ->check(CLI::IsMember({"stc", "hd"}))
      ->capture_default_str();
  cmd->add_flag("--no-probs", a.no_probs, "Feed constant 1.0 instead of ASR posteriors");
  cmd->add_flag("--cls-only", a.cls_only, "Represent the utterance by the [CLS] state only");
  cmd->add_flag("--no-system-act", a.no_system_act, "Drop the previous system act from the input");
  cmd->add_option("--prune-threshold", a.prune_threshold, "Drop candidates with posterior below this")
      ->capture_default_str();
  cmd->add_option("--interjections", a.interjections, "File of interjection words to prune");
  cmd->add_option("--epochs", a.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--lr", a.lr, "Peak learning rate")->capture_default_str();
  cmd->add_option("--batch-size", a.batch_size, "Examples per update")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--seeds", a.seeds, "Train this many runs with seeds seed, seed+1, ...")
      ->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads (results do not depend on it)")
      ->capture_default_str();
  cmd->add_flag("--quiet", a.quiet, "Do not print per-epoch progress");
}

void print_epoch(const char* line, void* user) {
  if (*static_cast<bool*>(user)) return;
  std::cerr << line << "\n";
}

int run_train(const CLI::App& cmd, const TrainArgs& a) {
  const std::string train_path =
      !a.train.empty() ? a.train : (a.data.empty() ? "" : (fs::path(a.data) / "train.jsonl").string());
  const std::string valid_path =
      !a.valid.empty() ? a.valid : (a.data.empty() ? "" : (fs::path(a.data) / "valid.jsonl").string());
  if (train_path.empty() || valid_path.empty()) {
    throw RuntimeFailure{"train needs --data or both --train and --valid"};
  }

  json cfg = a.config.empty() ? json::object() : read_json_file(a.config);
  auto set = [&](const char* flag, const char* key, const json& value) {
    if (cmd.count(flag) > 0 || !cfg.contains(key)) cfg[key] = value;
  };
  set("--head", "head", a.head);
  set("--no-probs", "use_probs", !a.no_probs);
  set("--cls-only", "cls_only", a.cls_only);
  set("--no-system-act", "use_system_act", !a.no_system_act);
  set("--prune-threshold", "prune_threshold", a.prune_threshold);
  set("--epochs", "epochs", a.epochs);
  set("--lr", "lr", a.lr);
  set("--batch-size", "batch_size", a.batch_size);
  set("--threads", "threads", a.threads);
  if (!a.interjections.empty()) cfg["interjections"] = read_word_list(a.interjections);
  const std::uint64_t base_seed =
      cmd.count("--seed") > 0 || !cfg.contains("seed") ? a.seed : cfg["seed"].get<std::uint64_t>();

  DatasetPtr train = load_dataset(train_path);
  DatasetPtr valid = load_dataset(valid_path);
  VocabPtr vocab;
  slu_vocab* v = nullptr;
  if (!a.vocab.empty()) {
    check(slu_vocab_load(a.vocab.c_str(), &v), "loading " + a.vocab);
  } else {
    const slu_dataset* sets[] = {train.get()};
    check(slu_vocab_build(sets, 1, a.vocab_size, 1, &v), "building vocabulary");
  }
  vocab.reset(v);

  std::vector<double> scores;
  for (std::size_t k = 0; k < std::max<std::size_t>(1, a.seeds); ++k) {
    const std::uint64_t seed = base_seed + k;
    cfg["seed"] = seed;
    const std::string out =
        a.seeds > 1 ? (fs::path(a.out) / ("seed-" + std::to_string(seed))).string() : a.out;
    ensure_dir(out);
    const std::string log = !a.log.empty() && a.seeds <= 1
                                ? a.log
                                : (fs::path(out) / "metrics.jsonl").string();
    bool quiet = a.quiet;
    slu_model* m = nullptr;
    double best = 0.0;
    check(slu_train(train.get(), valid.get(), vocab.get(), cfg.dump().c_str(), log.c_str(),
                    print_epoch, &quiet, &m, &best),
          "train");
    ModelPtr model(m);
    check(slu_model_save(model.get(), out.c_str()), "saving checkpoint to " + out);
    std::cerr << "seed " << seed << ": best valid F1 " << best << ", checkpoint " << out << "\n";
    scores.push_back(best);
  }
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  const double stddev = scores.size() > 1 ? std::sqrt(var / static_cast<double>(scores.size() - 1)) : 0.0;
  std::cout << json{{"best_valid_f1", scores}, {"mean", mean}, {"stddev", stddev}}.dump() << "\n";
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string pred, gold, train, model, data, out;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* cmd = app.add_subcommand("eval", "Score predictions (or a model) against gold labels");
  cmd->add_option("--pred", a.pred, "Predicted frames JSONL");
  cmd->add_option("--gold", a.gold, "Gold JSONL (dataset or frames)");
  cmd->add_option("--model", a.model, "Checkpoint directory to run instead of --pred");
  cmd->add_option("--data", a.data, "Dataset JSONL scored with --model");
  cmd->add_option("--train", a.train, "Training JSONL for the seen/unseen breakdown");
  cmd->add_option("--out", a.out, "Report file (default: stdout)");
  cmd->add_option("--threads", a.threads, "Worker threads")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed (evaluation is deterministic)")->capture_default_str();
}

int run_eval(const EvalArgs& a) {
  char* report = nullptr;
  if (!a.model.empty()) {
    if (a.data.empty()) throw RuntimeFailure{"eval --model needs --data"};
    slu_model* m = nullptr;
    check(slu_model_load(a.model.c_str(), &m), "loading " + a.model);
    ModelPtr model(m);
    DatasetPtr data = load_dataset(a.data);
    DatasetPtr train = a.train.empty() ? nullptr : load_dataset(a.train);
    check(slu_evaluate_model(model.get(), data.get(), train.get(), a.threads, &report), "eval");
  } else {
    if (a.pred.empty() || a.gold.empty()) throw RuntimeFailure{"eval needs --pred and --gold, or --model and --data"};
    check(slu_evaluate_files(a.pred.c_str(), a.gold.c_str(), a.train.empty() ? nullptr : a.train.c_str(),
                             &report),
          "eval");
  }
  StringPtr owned(report);
  write_text(a.out, std::string(report) + "\n");
  return 0;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string model, data, out;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
};

void add_predict(CLI::App& app, PredictArgs& a) {
  auto* cmd = app.add_subcommand("predict", "Write predicted frames as JSONL");
  cmd->add_option("--model", a.model, "Checkpoint directory")->required();
  cmd->add_option("--data", a.data, "Dataset JSONL")->required();
  cmd->add_option("--out", a.out, "Output JSONL (default: stdout)");
  cmd->add_option("--threads", a.threads, "Worker threads")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed (decoding is deterministic)")->capture_default_str();
}

int run_predict(const PredictArgs& a) {
  slu_model* m = nullptr;
  check(slu_model_load(a.model.c_str(), &m), "loading " + a.model);
  ModelPtr model(m);
  DatasetPtr data = load_dataset(a.data);
  char* jsonl = nullptr;
  check(slu_predict(model.get(), data.get(), a.threads, &jsonl), "predict");
  StringPtr owned(jsonl);
  write_text(a.out, jsonl);
  return 0;
}

// --- gradcheck --------------------------------------------------------------

struct GradArgs {
  double tol = 1e-4;
  double step = 1e-4;
  std::uint64_t seed = 0;
  bool json_out = false;
};

void add_gradcheck(CLI::App& app, GradArgs& a) {
  auto* cmd = app.add_subcommand("gradcheck", "Run the finite-difference gradient oracle");
  cmd->add_option("--tol", a.tol, "Maximum relative error")->capture_default_str();
  cmd->add_option("--step", a.step, "Finite-difference step")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed of the toy model")->capture_default_str();
  cmd->add_flag("--json", a.json_out, "Print the full JSON report");
}

int run_gradcheck(const GradArgs& a) {
  char* report = nullptr;
  int passed = 0;
  check(slu_gradcheck(a.tol, a.step, a.seed, &report, &passed), "gradcheck");
  StringPtr owned(report);
  if (a.json_out) {
    std::cout << report << "\n";
  } else {
    const json j = json::parse(report);
    for (const auto& c : j["checks"]) {
      std::printf("%-4s %-24s max_rel=%.3e coords=%zu\n", c["passed"].get<bool>() ? "ok" : "FAIL",
                  c["name"].get<std::string>().c_str(), c["max_rel_error"].get<double>(),
                  c["coordinates"].get<std::size_t>());
    }
    std::printf("%s\n", passed ? "all gradient checks passed" : "gradient check FAILED");
  }
  return passed ? 0 : kRuntimeError;
}

// --- inspect ----------------------------------------------------------------

struct InspectArgs {
  std::string data, id, vocab, interjections;
  std::size_t index = 0;
  double prune_threshold = 0.001;
  bool no_system_act = false;
  std::uint64_t seed = 0;
};

void add_inspect(CLI::App& app, InspectArgs& a) {
  auto* cmd = app.add_subcommand("inspect", "Show pruning, flattening, positions and probabilities");
  cmd->add_option("--data", a.data, "Dataset JSONL")->required();
  cmd->add_option("--vocab", a.vocab, "Vocabulary file")->required();
  cmd->add_option("--id", a.id, "Record id (default: use --index)");
  cmd->add_option("--index", a.index, "0-based record index")->capture_default_str();
  cmd->add_option("--prune-threshold", a.prune_threshold, "Drop candidates with posterior below this")
      ->capture_default_str();
  cmd->add_option("--interjections", a.interjections, "File of interjection words to prune");
  cmd->add_flag("--no-system-act", a.no_system_act, "Drop the previous system act from the input");
  cmd->add_option("--seed", a.seed, "Random seed (inspection is deterministic)")->capture_default_str();
}

int run_inspect(const InspectArgs& a) {
  DatasetPtr data = load_dataset(a.data);
  slu_vocab* v = nullptr;
  check(slu_vocab_load(a.vocab.c_str(), &v), "loading " + a.vocab);
  VocabPtr vocab(v);
  std::size_t index = a.index;
  if (!a.id.empty()) check(slu_dataset_find(data.get(), a.id.c_str(), &index), "inspect");
  json opts = {{"prune_threshold", a.prune_threshold}, {"use_system_act", !a.no_system_act}};
  if (!a.interjections.empty()) opts["interjections"] = read_word_list(a.interjections);
  char* text = nullptr;
  check(slu_inspect(data.get(), index, vocab.get(), opts.dump().c_str(), &text), "inspect");
  StringPtr owned(text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spoken language understanding over ASR word confusion networks"};
  app.set_version_flag("--version", slu_version());
  app.require_subcommand(1);

  SynthArgs synth;
  VocabArgs vocab;
  TrainArgs train;
  EvalArgs eval;
  PredictArgs predict;
  GradArgs grad;
  InspectArgs inspect;
  add_synth(app, synth);
  add_vocab(app, vocab);
  add_train(app, train);
  add_eval(app, eval);
  add_predict(app, predict);
  add_gradcheck(app, grad);
  add_inspect(app, inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    const CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "synth") return run_synth(*cmd, synth);
    if (name == "build-vocab") return run_vocab(vocab);
    if (name == "train") return run_train(*cmd, train);
    if (name == "eval") return run_eval(eval);
    if (name == "predict") return run_predict(predict);
    if (name == "gradcheck") return run_gradcheck(grad);
    if (name == "inspect") return run_inspect(inspect);
  } catch (const RuntimeFailure& f) {
    std::cerr << "slu: " << f.message << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "slu: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
