/* C interface to the tdsa shared library.
 *
 * Every function that can fail returns a tdsa_status; TDSA_OK means success.
 * On failure, tdsa_last_error() returns a thread-local message describing the
 * most recent failing call. Strings returned through char** outputs are owned
 * by the caller and must be released with tdsa_string_free(); handles are
 * released with their matching *_free function.
 */
#ifndef TDSA_H
#define TDSA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tdsa_status {
  TDSA_OK = 0,
  TDSA_ERR_IO = 1,
  TDSA_ERR_PARSE = 2,
  TDSA_ERR_INVALID_ARGUMENT = 3,
  TDSA_ERR_STATE = 4,
  TDSA_ERR_INTERNAL = 5
} tdsa_status;

typedef struct tdsa_dataset tdsa_dataset;
typedef struct tdsa_lexicon tdsa_lexicon;
typedef struct tdsa_embedding tdsa_embedding;

const char* tdsa_version(void);
const char* tdsa_last_error(void);
void tdsa_string_free(char* s);

/* ------------------------------------------------------------------ */
/* datasets                                                            */
/* ------------------------------------------------------------------ */

typedef struct tdsa_parse_counts {
  size_t accepted;
  size_t rejected;
  size_t skipped_no_span;
  size_t dropped_conflict;
  size_t multi_occurrence;
} tdsa_parse_counts;

/* format: semeval | dong | mitchell | election | youtubean | jsonl.
 * in_path may be a file or a directory of files. counts may be NULL. */
tdsa_status tdsa_dataset_parse(const char* format, const char* in_path,
                               tdsa_parse_counts* counts, tdsa_dataset** out);
tdsa_status tdsa_dataset_read_jsonl(const char* path, tdsa_dataset** out);
tdsa_status tdsa_dataset_write_jsonl(const tdsa_dataset* dataset, const char* path);
size_t tdsa_dataset_size(const tdsa_dataset* dataset);
tdsa_status tdsa_dataset_split(const tdsa_dataset* dataset, double test_fraction,
                               uint64_t seed, tdsa_dataset** train, tdsa_dataset** test);
void tdsa_dataset_free(tdsa_dataset* dataset);

typedef struct tdsa_stats {
  size_t size;
  double ats;
  size_t uniq;
  double avg_len;
  double s1;
  double s2;
  double s3;
  int spoken;
} tdsa_stats;

tdsa_status tdsa_dataset_stats(const tdsa_dataset* dataset, tdsa_stats* out);
/* Serialized dataset_stats record (feeds `report --shape table2`). */
tdsa_status tdsa_dataset_stats_record(const tdsa_dataset* dataset, char** record_json);

/* Adds token arrays to every record of a canonical jsonl file. */
tdsa_status tdsa_tokenize_file(const char* in_jsonl, const char* out_jsonl);

/* ------------------------------------------------------------------ */
/* lexicons                                                            */
/* ------------------------------------------------------------------ */

/* kind: mpqa | nrc (single-file formats). */
tdsa_status tdsa_lexicon_load(const char* kind, const char* path, tdsa_lexicon** out);
tdsa_status tdsa_lexicon_load_hl(const char* pos_path, const char* neg_path, tdsa_lexicon** out);
tdsa_status tdsa_lexicon_union(const tdsa_lexicon* const* lexicons, size_t count,
                               tdsa_lexicon** out);
tdsa_status tdsa_lexicon_counts(const tdsa_lexicon* lexicon, int lowered, size_t* positive,
                                size_t* negative);
void tdsa_lexicon_free(tdsa_lexicon* lexicon);

/* Full Table-3-shaped audit of the lexicons configured in config_path. */
tdsa_status tdsa_lexicon_stats(const char* config_path, char** record_json);

/* ------------------------------------------------------------------ */
/* embeddings                                                          */
/* ------------------------------------------------------------------ */

tdsa_status tdsa_embedding_load(const char* path, tdsa_embedding** out);
size_t tdsa_embedding_dim(const tdsa_embedding* embedding);
size_t tdsa_embedding_vocab(const tdsa_embedding* embedding);
/* Copies the word's vector (zeros for unknown words) into out_buffer. */
tdsa_status tdsa_embedding_lookup(const tdsa_embedding* embedding, const char* word,
                                  double* out_buffer, size_t buffer_len);
void tdsa_embedding_free(tdsa_embedding* embedding);

/* JSON description of the named embedding from the config. */
tdsa_status tdsa_embed_info(const char* config_path, const char* name, char** info_json);

/* ------------------------------------------------------------------ */
/* pipelines                                                           */
/* ------------------------------------------------------------------ */

/* overrides: optional "key=value" assignments applied on top of the config
 * file, TOML value syntax on the right-hand side. */
tdsa_status tdsa_extract_features(const char* config_path, const char* const* overrides,
                                  size_t n_overrides, const char* in_jsonl, const char* conllu,
                                  const char* out_path, char** sidecar_json);

tdsa_status tdsa_run_experiment(const char* config_path, const char* const* overrides,
                                size_t n_overrides, const char* results_dir,
                                char** record_json);

tdsa_status tdsa_run_multiseed(const char* config_path, const char* const* overrides,
                               size_t n_overrides, const char* dist_out_path,
                               const char* results_dir, char** record_json);

tdsa_status tdsa_cv_select(const char* config_path, const char* const* overrides,
                           size_t n_overrides, char** result_json);

/* shape: table2 | table3 | table4 | table5 | table6 | fig_dist.
 * record_paths are results-store files; their content hashes are verified. */
tdsa_status tdsa_report(const char* shape, const char* const* record_paths, size_t count,
                        char** text, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* TDSA_H */
