#ifndef GPSOL_H
#define GPSOL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Columns of a run record, in CSV order.
 */
typedef enum GpsolColumn {
  GPSOL_COLUMN_T = 0,
  GPSOL_COLUMN_X0_PDE,
  GPSOL_COLUMN_X0_ODE_FULL,
  GPSOL_COLUMN_X0_ODE_TAYLOR,
  GPSOL_COLUMN_X0_EOM,
  GPSOL_COLUMN_X0_EOM_A,
  GPSOL_COLUMN_AUX_PDE,
  GPSOL_COLUMN_AUX_ODE,
  GPSOL_COLUMN_CONSERVED,
  GPSOL_COLUMN_DELTA_ODE_FULL,
  GPSOL_COLUMN_DELTA_EOM,
  GPSOL_COLUMN_DELTA_EOM_A,
} GpsolColumn;

/**
 * Call status. The non-zero values match the exit codes of the `gpsol` CLI.
 */
typedef enum GpsolStatus {
  GPSOL_STATUS_OK = 0,
  GPSOL_STATUS_IO = 1,
  GPSOL_STATUS_CONFIG = 2,
  GPSOL_STATUS_NUMERICAL = 3,
  GPSOL_STATUS_SINGULARITY = 4,
  /**
   * A required pointer was null or a string was not valid UTF-8.
   */
  GPSOL_STATUS_INVALID_ARGUMENT = 5,
  /**
   * The requested column is not part of the record.
   */
  GPSOL_STATUS_ABSENT = 6,
  GPSOL_STATUS_PANIC = 7,
} GpsolStatus;

/**
 * Opaque validated experiment configuration.
 */
typedef struct GpsolConfig GpsolConfig;

/**
 * Opaque result of [`gpsol_run`].
 */
typedef struct GpsolRecord GpsolRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. The pointer stays valid until
 * the next failing call on the same thread.
 */
const char *gpsol_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gpsol_version(void);

/**
 * Parses `key=value` configuration text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GpsolStatus gpsol_config_parse(const char *text, struct GpsolConfig **out);

/**
 * Reads and parses a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GpsolStatus gpsol_config_load(const char *path, struct GpsolConfig **out);

/**
 * Overrides one key and revalidates. On failure the handle is left unchanged.
 *
 * # Safety
 * `config` must come from this library; `key` and `value` must be NUL-terminated.
 */
enum GpsolStatus gpsol_config_set(struct GpsolConfig *config, const char *key, const char *value);

/**
 * Number of output rows the configuration will produce.
 *
 * # Safety
 * `config` must be null or come from this library.
 */
size_t gpsol_config_row_count(const struct GpsolConfig *config);

/**
 * Releases a configuration. Null is ignored.
 *
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void gpsol_config_free(struct GpsolConfig *config);

/**
 * Runs every tier of the configuration.
 *
 * # Safety
 * `config` must come from this library and `out` must be writable.
 */
enum GpsolStatus gpsol_run(const struct GpsolConfig *config, struct GpsolRecord **out);

/**
 * Number of sample rows.
 *
 * # Safety
 * `record` must be null or come from this library.
 */
size_t gpsol_record_rows(const struct GpsolRecord *record);

/**
 * Copies one column into `buffer`, which must hold `gpsol_record_rows` values.
 * Returns `Absent` when the tier behind the column was not run.
 *
 * # Safety
 * `record` must come from this library; `buffer` must be writable for `len` doubles.
 */
enum GpsolStatus gpsol_record_column(const struct GpsolRecord *record,
                                     enum GpsolColumn which,
                                     double *buffer,
                                     size_t len);

/**
 * Largest relative drift of the PDE norm, or a negative value without a PDE tier.
 *
 * # Safety
 * `record` must be null or come from this library.
 */
double gpsol_record_norm_drift(const struct GpsolRecord *record);

/**
 * Writes the record as CSV to `path`.
 *
 * # Safety
 * `record` must come from this library and `path` must be NUL-terminated.
 */
enum GpsolStatus gpsol_record_write_csv(const struct GpsolRecord *record, const char *path);

/**
 * Renders the record as CSV text. Release the string with [`gpsol_string_free`].
 *
 * # Safety
 * `record` must come from this library and `out` must be writable.
 */
enum GpsolStatus gpsol_record_csv(const struct GpsolRecord *record, char **out);

/**
 * Releases a record. Null is ignored.
 *
 * # Safety
 * `record` must be null or a handle not yet freed.
 */
void gpsol_record_free(struct GpsolRecord *record);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void gpsol_string_free(char *s);

/**
 * Dark-soliton EOM acceleration `x0'' = (2/3) C/(D + Cx0) (1 - v²)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GpsolStatus gpsol_dark_eom_rhs(double x0, double v, double c, double d, double *out);

/**
 * Dark-soliton effective potential `-(2/3) ln|Cx0 + D|`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GpsolStatus gpsol_dark_effective_potential(double x0, double c, double d, double *out);

/**
 * Bright-soliton EOM acceleration in lab time.
 *
 * # Safety
 * `out` must be writable.
 */
enum GpsolStatus gpsol_bright_eom_rhs(double zeta,
                                      double eta0,
                                      double zeta0,
                                      double c,
                                      double d,
                                      double *out);

/**
 * Bright-soliton amplitude `η0 (Cζ0 + D)² / (Cζ + D)²`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GpsolStatus gpsol_bright_eta(double eta0,
                                  double zeta0,
                                  double zeta,
                                  double c,
                                  double d,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GPSOL_H */
