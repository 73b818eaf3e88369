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

/* C interface to the wcnslu library. Objects are opaque handles created and
 * released through this header. Every fallible call returns a slu_status;
 * on failure slu_last_error() holds a message for the calling thread.
 * Strings returned through char** out-parameters are owned by the caller
 * and must be released with slu_string_free(). */

#ifndef WCNSLU_WCNSLU_H_
#define WCNSLU_WCNSLU_H_

#include <stddef.h>
#include <stdint.h>

#if defined(WCNSLU_BUILDING_LIBRARY)
#define WCNSLU_API __attribute__((visibility("default")))
#else
#define WCNSLU_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum slu_status {
  SLU_OK = 0,
  SLU_ERR_INVALID_ARGUMENT = 1,
  SLU_ERR_IO = 2,
  SLU_ERR_PARSE = 3,
  SLU_ERR_INVALID_PROBABILITY = 4,
  SLU_ERR_INVALID_WCN = 5,
  SLU_ERR_ALL_BINS_PRUNED = 6,
  SLU_ERR_EMPTY_INPUT = 7,
  SLU_ERR_SHAPE_MISMATCH = 8,
  SLU_ERR_INDEX_OUT_OF_RANGE = 9,
  SLU_ERR_NON_FINITE = 10,
  SLU_ERR_CORPUS_EMPTY = 11,
  SLU_ERR_EMPTY_LABELS = 12,
  SLU_ERR_UNKNOWN_ACT_OR_SLOT = 13,
  SLU_ERR_DEGENERATE_INPUT = 14,
  SLU_ERR_LENGTH_MISMATCH = 15,
  SLU_ERR_INTERNAL = 16
} slu_status;

typedef struct slu_dataset slu_dataset;
typedef struct slu_vocab slu_vocab;
typedef struct slu_model slu_model;

/* Receives one JSON object per finished epoch:
 * {"epoch", "train_loss", "valid_f1", "valid_acc", "lr"}. */
typedef void (*slu_epoch_callback)(const char* json, void* user);

WCNSLU_API const char* slu_version(void);
WCNSLU_API const char* slu_status_string(slu_status status);
WCNSLU_API const char* slu_last_error(void);
WCNSLU_API void slu_string_free(char* s);

/* Datasets (JSONL, one example per line). */
WCNSLU_API slu_status slu_dataset_load(const char* path, slu_dataset** out);
WCNSLU_API slu_status slu_dataset_save(const slu_dataset* data, const char* path);
WCNSLU_API size_t slu_dataset_size(const slu_dataset* data);
WCNSLU_API slu_status slu_dataset_find(const slu_dataset* data, const char* id, size_t* index);
WCNSLU_API void slu_dataset_free(slu_dataset* data);

/* Synthetic corpus. config_json may be NULL for defaults. */
WCNSLU_API slu_status slu_synth_generate(const char* config_json, slu_dataset** train,
                                         slu_dataset** valid, slu_dataset** test);

/* Vocabulary. */
WCNSLU_API slu_status slu_vocab_build(const slu_dataset* const* sets, size_t n_sets,
                                      size_t max_size, size_t min_freq, slu_vocab** out);
WCNSLU_API slu_status slu_vocab_load(const char* path, slu_vocab** out);
WCNSLU_API slu_status slu_vocab_save(const slu_vocab* vocab, const char* path);
WCNSLU_API size_t slu_vocab_size(const slu_vocab* vocab);
WCNSLU_API void slu_vocab_free(slu_vocab* vocab);

/* Training. config_json is a flat object of training and model keys (NULL
 * for defaults). log_path and callback may be NULL. */
WCNSLU_API slu_status slu_train(const slu_dataset* train, const slu_dataset* valid,
                                const slu_vocab* vocab, const char* config_json,
                                const char* log_path, slu_epoch_callback callback, void* user,
                                slu_model** out, double* best_valid_f1);

/* Checkpoints are directories (manifest.json, params.bin, vocab.txt,
 * ontology.json). */
WCNSLU_API slu_status slu_model_save(const slu_model* model, const char* dir);
WCNSLU_API slu_status slu_model_load(const char* dir, slu_model** out);
WCNSLU_API slu_status slu_model_info(const slu_model* model, char** json_out);
WCNSLU_API void slu_model_free(slu_model* model);

/* Predicted frames as JSONL: {"id", "labels"} per example. */
WCNSLU_API slu_status slu_predict(const slu_model* model, const slu_dataset* data, size_t threads,
                                  char** jsonl_out);

/* Evaluation reports as JSON. train may be NULL; when given, the report
 * carries seen/unseen partitions. */
WCNSLU_API slu_status slu_evaluate_files(const char* pred_path, const char* gold_path,
                                         const char* train_path, char** json_out);
WCNSLU_API slu_status slu_evaluate_model(const slu_model* model, const slu_dataset* test,
                                         const slu_dataset* train, size_t threads,
                                         char** json_out);

/* Finite-difference oracle over every op and both losses on a toy model. */
WCNSLU_API slu_status slu_gradcheck(double tolerance, double step, uint64_t seed,
                                    char** json_out, int* passed);

/* Human-readable dump of pruning, flattening, positions, segments and
 * probabilities for one record. options_json keys: prune_threshold,
 * interjections, use_system_act (all optional). */
WCNSLU_API slu_status slu_inspect(const slu_dataset* data, size_t index, const slu_vocab* vocab,
                                  const char* options_json, char** text_out);

#ifdef __cplusplus
}
#endif

#endif  /* WCNSLU_WCNSLU_H_ */
