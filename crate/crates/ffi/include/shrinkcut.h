#ifndef SHRINKCUT_H
#define SHRINKCUT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Integer settings addressable through [`shrinkcut_config_set`].
 */
typedef enum ShrinkcutSetting {
  SHRINKCUT_SETTING_BETA = 0,
  SHRINKCUT_SETTING_SHRINK_TARGET = 1,
  SHRINKCUT_SETTING_NODE_LIMIT = 2,
  SHRINKCUT_SETTING_LAYERS = 3,
  SHRINKCUT_SETTING_RESTARTS = 4,
  SHRINKCUT_SETTING_MAX_EVALS = 5,
  SHRINKCUT_SETTING_SHOTS = 6,
  SHRINKCUT_SETTING_TOP_K = 7,
  /**
   * 0 lexicographic, 1 heaviest edge.
   */
  SHRINKCUT_SETTING_TIE_BREAK = 8,
} ShrinkcutSetting;

typedef enum ShrinkcutStatus {
  SHRINKCUT_STATUS_OK = 0,
  SHRINKCUT_STATUS_NULL_POINTER = 1,
  SHRINKCUT_STATUS_INVALID_ARGUMENT = 2,
  SHRINKCUT_STATUS_STAGE_FAILED = 3,
  SHRINKCUT_STATUS_IO = 4,
  SHRINKCUT_STATUS_VERIFY_FAILED = 5,
  SHRINKCUT_STATUS_PANIC = 6,
} ShrinkcutStatus;

/**
 * Pipeline configuration.
 */
typedef struct ShrinkcutConfig ShrinkcutConfig;

/**
 * A finished pipeline run.
 */
typedef struct ShrinkcutRun ShrinkcutRun;

/**
 * Scalar results of a run.
 */
typedef struct ShrinkcutSummary {
  size_t maxcut_vertices;
  size_t separator_size;
  size_t shrunk_vertices;
  size_t qubits_a;
  size_t qubits_b;
  double kappa;
  double expectation_uncut;
  double expectation_cut;
  double expectation_sampling;
  double optimal_length;
  /**
   * Length of the best decoded tour, or a negative value if none was feasible.
   */
  double best_length;
  bool found_optimal;
} ShrinkcutSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid until the next failing call.
 */
const char *shrinkcut_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *shrinkcut_version(void);

/**
 * Default configuration for a generated instance with `n_cities` cities.
 */
struct ShrinkcutConfig *shrinkcut_config_new(size_t n_cities, uint64_t seed);

/**
 * # Safety
 * `cfg` must come from [`shrinkcut_config_new`] and not be freed twice.
 */
void shrinkcut_config_free(struct ShrinkcutConfig *cfg);

/**
 * # Safety
 * `cfg` must be a live configuration handle.
 */
enum ShrinkcutStatus shrinkcut_config_set(struct ShrinkcutConfig *cfg,
                                          enum ShrinkcutSetting setting,
                                          size_t value);

/**
 * Loads the instance from a TSP JSON file instead of generating one.
 *
 * # Safety
 * `cfg` must be a live configuration handle and `path` a NUL-terminated string.
 */
enum ShrinkcutStatus shrinkcut_config_set_instance_file(struct ShrinkcutConfig *cfg,
                                                        const char *path);

/**
 * Runs every stage. `out_dir` may be null to skip writing artifacts.
 *
 * # Safety
 * `cfg` must be a live handle, `out_dir` null or NUL-terminated, `out` writable.
 */
enum ShrinkcutStatus shrinkcut_run(const struct ShrinkcutConfig *cfg,
                                   const char *out_dir,
                                   struct ShrinkcutRun **out);

/**
 * # Safety
 * `run` must come from [`shrinkcut_run`] and not be freed twice.
 */
void shrinkcut_run_free(struct ShrinkcutRun *run);

/**
 * # Safety
 * `run` must be a live run handle and `out` writable.
 */
enum ShrinkcutStatus shrinkcut_run_summary(const struct ShrinkcutRun *run,
                                           struct ShrinkcutSummary *out);

/**
 * Copies the best decoded tour into `cities`. `len` receives the tour size;
 * when `capacity` is too small nothing is copied and `INVALID_ARGUMENT` is returned.
 *
 * # Safety
 * `run` must be live, `cities` valid for `capacity` writes, `len` writable.
 */
enum ShrinkcutStatus shrinkcut_run_best_tour(const struct ShrinkcutRun *run,
                                             size_t *cities,
                                             size_t capacity,
                                             size_t *len);

/**
 * Report as JSON. Release with [`shrinkcut_string_free`].
 *
 * # Safety
 * `run` must be live and `out` writable.
 */
enum ShrinkcutStatus shrinkcut_run_report_json(const struct ShrinkcutRun *run, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void shrinkcut_string_free(char *s);

/**
 * Checks both wire-cut decompositions; deviations are written when the pointers are non-null.
 *
 * # Safety
 * Non-null pointers must be writable.
 */
enum ShrinkcutStatus shrinkcut_verify_qpd(double *harada_deviation, double *peng_deviation);

/**
 * Shots to observe a string of probability `p` with failure rate `delta`, uncut and cut.
 *
 * # Safety
 * `n` and `n_tilde` must be writable.
 */
enum ShrinkcutStatus shrinkcut_sampling_overhead(double delta,
                                                 double p,
                                                 double kappa,
                                                 uint64_t *n,
                                                 uint64_t *n_tilde);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHRINKCUT_H */
