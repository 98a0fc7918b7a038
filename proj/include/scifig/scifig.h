#ifndef SCIFIG_SCIFIG_H
#define SCIFIG_SCIFIG_H

/* C interface to libscifig. Strings returned through char** out-params are
 * heap copies owned by the caller; release them with scifig_string_free. The
 * message for the last failing call on the current thread is available from
 * scifig_last_error until the next call on that thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SCIFIG_API __declspec(dllexport)
#else
#define SCIFIG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* 0..3 double as process exit codes. */
typedef enum scifig_status {
  SCIFIG_OK = 0,
  SCIFIG_ERR_CONFIG = 1,
  SCIFIG_ERR_EXTRACTION = 2,
  SCIFIG_ERR_PROVIDER = 3,
  SCIFIG_ERR_INVALID_ARGUMENT = 10,
  SCIFIG_ERR_IO = 11,
  SCIFIG_ERR_MALFORMED = 12,
  SCIFIG_ERR_CORPUS = 13,
  SCIFIG_ERR_INTERNAL = 14
} scifig_status;

SCIFIG_API const char* scifig_version(void);
SCIFIG_API const char* scifig_last_error(void);
SCIFIG_API const char* scifig_status_name(scifig_status status);
SCIFIG_API void scifig_string_free(char* s);
/* trace, debug, info, warn, error, off. Logs go to stderr. */
SCIFIG_API scifig_status scifig_set_log_level(const char* level);

/* ---- command sessions ----------------------------------------------------
 * A session collects the options shared by the commands:
 *   config, ablation, max_rounds, replay, record, out, questions_dir,
 *   corpus, paper_id, common_only (0|1), index, n, seed, strata */
typedef struct scifig_session scifig_session;

SCIFIG_API scifig_status scifig_session_create(scifig_session** out);
SCIFIG_API void scifig_session_destroy(scifig_session* session);
SCIFIG_API scifig_status scifig_session_set_option(scifig_session* session, const char* key, const char* value);

/* Runs text -> figure. On success *summary_json (optional) holds counts and
 * the output directory. */
SCIFIG_API scifig_status scifig_generate(scifig_session* session, const char* input_path, char** summary_json);
/* Scores a PNG or SVG figure. *report_text gets the printed score table. */
SCIFIG_API scifig_status scifig_evaluate(scifig_session* session, const char* figure_path, const char* method_path,
                                         char** report_text);
/* subcommand: "ingest" (root = path) or "sample" (root may be NULL when the
 * session has an index). *output gets the record count or sampled ids. */
SCIFIG_API scifig_status scifig_corpus_command(scifig_session* session, const char* subcommand, const char* root,
                                               char** output);

/* ---- ranking ---------------------------------------------------------- */
/* CSV text, one rater per row. *table_csv gets "item,score" lines. */
SCIFIG_API scifig_status scifig_rank_csv(const char* csv_text, char** table_csv);
SCIFIG_API scifig_status scifig_rank_file(const char* csv_path, char** table_csv);

/* ---- layouts ------------------------------------------------------------ */
typedef struct scifig_layout scifig_layout;

/* hierarchy_json: a hierarchy document; params_json may be NULL or a
 * "layout" config section. */
SCIFIG_API scifig_status scifig_layout_generate(const char* hierarchy_json, const char* params_json,
                                                scifig_layout** out);
SCIFIG_API void scifig_layout_destroy(scifig_layout* layout);
SCIFIG_API scifig_status scifig_layout_violations(const scifig_layout* layout, size_t* count);
SCIFIG_API scifig_status scifig_layout_to_json(const scifig_layout* layout, char** json);
SCIFIG_API scifig_status scifig_layout_to_svg(const scifig_layout* layout, char** svg);

/* ---- corpus ------------------------------------------------------------- */
typedef struct scifig_corpus scifig_corpus;

/* path: corpus root directory or a saved JSONL index. */
SCIFIG_API scifig_status scifig_corpus_open(const char* path, scifig_corpus** out);
SCIFIG_API void scifig_corpus_destroy(scifig_corpus* corpus);
SCIFIG_API size_t scifig_corpus_size(const scifig_corpus* corpus);
/* strata: "venue" or "domain". *ids_json gets a JSON array of paper ids. */
SCIFIG_API scifig_status scifig_corpus_sample(const scifig_corpus* corpus, size_t n, const char* strata,
                                              uint64_t seed, char** ids_json);

#ifdef __cplusplus
}
#endif

#endif
