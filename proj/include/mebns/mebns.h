#ifndef MEBNS_H
#define MEBNS_H

/* Public C interface of the mebns library.
 *
 * Every entry point returns a mebns_status; on failure the thread-local
 * message from mebns_last_error() describes what went wrong. Objects are
 * opaque handles released with their _free function. Strings returned
 * through char** out-parameters are heap-allocated and must be released
 * with mebns_string_free.
 */

#include <stdint.h>

#if defined(_WIN32)
#define MEBNS_API __declspec(dllexport)
#else
#define MEBNS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mebns_status {
  MEBNS_OK = 0,
  MEBNS_ERR_CONFIG = 1,  /* bad option value / inconsistent configuration */
  MEBNS_ERR_IO = 2,      /* file cannot be opened or written */
  MEBNS_ERR_PARSE = 3,   /* malformed input data */
  MEBNS_ERR_NUMERIC = 4, /* non-finite values where finite ones are required */
  MEBNS_ERR_RUNTIME = 5  /* everything else that goes wrong while running */
} mebns_status;

/* Library version as "major.minor.patch". Static storage; do not free. */
MEBNS_API const char* mebns_version(void);

/* Message of the calling thread's most recent failure ("" if none).
 * Static storage; do not free. Overwritten by the next failing call. */
MEBNS_API const char* mebns_last_error(void);

MEBNS_API void mebns_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

typedef struct mebns_config mebns_config;

/* Fresh configuration with every knob at its default. Never fails. */
MEBNS_API mebns_config* mebns_config_create(void);

/* Parses a key=value config file (defaults fill absent keys) and validates. */
MEBNS_API mebns_status mebns_config_load(const char* path, mebns_config** out);

/* Applies one dotted-key override, e.g. ("run.seed", "7"). Validation is
 * deferred to mebns_config_validate or the run entry points. */
MEBNS_API mebns_status mebns_config_set(mebns_config* cfg, const char* key,
                                        const char* value);

MEBNS_API mebns_status mebns_config_validate(const mebns_config* cfg);

/* Stable-key-order JSON rendering of the full configuration. */
MEBNS_API mebns_status mebns_config_to_json(const mebns_config* cfg,
                                            char** json_out);

MEBNS_API void mebns_config_free(mebns_config* cfg);

/* ---- dataset ----------------------------------------------------------- */

typedef struct mebns_graph mebns_graph;

/* Loads the dataset named by cfg's data.* keys. */
MEBNS_API mebns_status mebns_graph_load(const mebns_config* cfg,
                                        mebns_graph** out);

MEBNS_API int64_t mebns_graph_nodes(const mebns_graph* g);
MEBNS_API int64_t mebns_graph_edges(const mebns_graph* g);
MEBNS_API int64_t mebns_graph_feature_dim(const mebns_graph* g);

MEBNS_API void mebns_graph_free(mebns_graph* g);

/* ---- runs -------------------------------------------------------------- */

/* Splits the dataset 70/10/20 and writes the split manifest JSON. */
MEBNS_API mebns_status mebns_run_split(const mebns_config* cfg,
                                       const char* out_path);

/* Full training run. Writes into out_dir (created if absent):
 *   report.json     training curves and test metrics
 *   config.cfg      the resolved configuration
 *   split.json      the edge split manifest
 *   teacher.ckpt    final first-phase parameters
 * and, when use_mebns is nonzero:
 *   student.ckpt    best-validation second-phase parameters
 *   meta.ckpt       final weighting-net parameters
 *   telemetry.jsonl per-iteration bilevel telemetry
 *   uncertainty.csv stability table behind the meta-data selection
 * plus, on request:
 *   scores.csv      probe-set score log   (log_scores nonzero)
 *   samples.csv     per-epoch sample dump (dump_samples nonzero)
 * Wall-clock timing goes to stdout when verbose is nonzero and is never
 * written into any artifact. */
MEBNS_API mebns_status mebns_run_train(const mebns_config* cfg,
                                       const char* out_dir, int use_mebns,
                                       int log_scores, int dump_samples,
                                       int verbose);

/* Test metrics of a parameter checkpoint under cfg's dataset and split,
 * as JSON {"auc": ..., "hits20": ..., "hits30": ...}. */
MEBNS_API mebns_status mebns_run_eval(const mebns_config* cfg,
                                      const char* checkpoint_path,
                                      char** metrics_json_out);

/* Classifies the probe samples of a score log at two epochs and crosses
 * them into a migration matrix. Writes the per-sample CSV when out_csv is
 * non-NULL; always returns the summary JSON. */
MEBNS_API mebns_status mebns_run_migration(const char* scores_csv_path,
                                           int64_t epoch_a, int64_t epoch_b,
                                           double gap_threshold,
                                           const char* out_csv,
                                           char** summary_json_out);

/* Numeric check of the loss-landscape gap bound on random instances.
 * Writes the full report JSON when out_json is non-NULL; the violation
 * count lands in *violations_out when it is non-NULL. */
MEBNS_API mebns_status mebns_run_theorem_check(int64_t instances, int64_t size,
                                               uint64_t seed, double tolerance,
                                               const char* out_json,
                                               int64_t* violations_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MEBNS_H */
