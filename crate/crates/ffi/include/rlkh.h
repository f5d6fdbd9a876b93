/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef RLKH_H
#define RLKH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum RlkhStatus {
  RLKH_STATUS_OK = 0,
  RLKH_STATUS_NULL_POINTER = 1,
  RLKH_STATUS_INVALID_ARGUMENT = 2,
  RLKH_STATUS_PARSE_ERROR = 3,
  RLKH_STATUS_IO_ERROR = 4,
  RLKH_STATUS_SOLVE_ERROR = 5,
  RLKH_STATUS_PANIC = 6,
} RlkhStatus;

typedef enum RlkhMode {
  RLKH_MODE_LKH_ALPHA = 0,
  RLKH_MODE_LKH_POPMUSIC = 1,
  RLKH_MODE_FIXQ_ALPHA = 2,
  RLKH_MODE_FIXQ_POPMUSIC = 3,
  RLKH_MODE_VSR_ALPHA = 4,
  RLKH_MODE_VSR_POPMUSIC = 5,
  RLKH_MODE_Q_ONLY = 6,
  RLKH_MODE_SARSA_ONLY = 7,
  RLKH_MODE_MC_ONLY = 8,
} RlkhMode;

// A symmetric TSP instance.
typedef struct RlkhInstance RlkhInstance;

// Outcome of a solve call.
typedef struct RlkhResult RlkhResult;

// Solver settings. Zero (or a non-positive time) selects the default of
// a field; [`rlkh_config_default`] fills in the usual values.
typedef struct RlkhSolverConfig {
  enum RlkhMode mode;
  uint64_t i_max;
  double t_max;
  uint64_t seed;
  uint32_t k_max;
  double lambda;
  double gamma;
  // Stagnating iterations before the update rule changes.
  uint64_t n_max;
  // Candidates per city.
  uint32_t width;
} RlkhSolverConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *rlkh_last_error(void);

// Writes the default settings to `out`.
//
// # Safety
// `out` must be null or point to writable memory for one config.
enum RlkhStatus rlkh_config_default(struct RlkhSolverConfig *out);

// Parses TSPLIB text.
//
// # Safety
// `text` must be null or a NUL-terminated string; `out` must be null or
// writable.
enum RlkhStatus rlkh_instance_from_tsplib(const char *text, struct RlkhInstance **out);

// Reads a TSPLIB file.
//
// # Safety
// As for [`rlkh_instance_from_tsplib`], with `path` a file name.
enum RlkhStatus rlkh_instance_from_file(const char *path, struct RlkhInstance **out);

// Builds a rounded Euclidean instance from `n` interleaved `x, y` pairs.
//
// # Safety
// `xy` must point to `2 * n` doubles; `out` must be null or writable.
enum RlkhStatus rlkh_instance_from_coords(const double *xy, size_t n, struct RlkhInstance **out);

// Number of cities, 0 for a null handle.
//
// # Safety
// `inst` must be null or a live handle.
size_t rlkh_instance_dimension(const struct RlkhInstance *inst);

// Cost between cities `i` and `j` (0-based), -1 when out of range.
//
// # Safety
// `inst` must be null or a live handle.
int64_t rlkh_instance_cost(const struct RlkhInstance *inst, size_t i, size_t j);

// # Safety
// `inst` must be null or a handle not yet freed.
void rlkh_instance_free(struct RlkhInstance *inst);

// Solves the TSP on `inst`. `config` may be null for the defaults.
//
// # Safety
// `inst` must be a live handle, `config` null or valid, `out` writable.
enum RlkhStatus rlkh_solve(const struct RlkhInstance *inst,
                           const struct RlkhSolverConfig *config,
                           struct RlkhResult **out);

// Solves with time windows. `windows` holds `2 * n` values `a0, b0, a1,
// b1, ...`; `service` holds `n` values or is null for none. City 0 is the
// depot and its window must contain 0.
//
// # Safety
// Pointers must be valid for the stated lengths; `out` must be writable.
enum RlkhStatus rlkh_solve_tsptw(const struct RlkhInstance *inst,
                                 const int64_t *windows,
                                 const int64_t *service,
                                 const struct RlkhSolverConfig *config,
                                 struct RlkhResult **out);

// Best tour length, -1 for a null handle.
//
// # Safety
// `r` must be null or a live handle.
int64_t rlkh_result_length(const struct RlkhResult *r);

// Best total lateness, 0 for plain TSP runs and -1 for a null handle.
//
// # Safety
// `r` must be null or a live handle.
int64_t rlkh_result_violation(const struct RlkhResult *r);

// # Safety
// `r` must be null or a live handle.
uint64_t rlkh_result_iterations(const struct RlkhResult *r);

// # Safety
// `r` must be null or a live handle.
double rlkh_result_seconds(const struct RlkhResult *r);

// Copies up to `cap` 0-based cities of the best tour into `buf` and
// returns the tour length in cities. Pass a null `buf` to query the size.
//
// # Safety
// `r` must be null or a live handle; `buf` must hold `cap` values.
size_t rlkh_result_tour(const struct RlkhResult *r, uint32_t *buf, size_t cap);

// # Safety
// `r` must be null or a handle not yet freed.
void rlkh_result_free(struct RlkhResult *r);

// Static name of a mode such as `"vsr-alpha"`.
const char *rlkh_mode_name(enum RlkhMode mode);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RLKH_H */
