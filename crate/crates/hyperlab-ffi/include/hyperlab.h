#ifndef HYPERLAB_H
#define HYPERLAB_H

/* Generated by cbindgen from crates/hyperlab-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_ARGUMENT = 2,
  HL_STATUS_DOMAIN = 3,
  HL_STATUS_CONFIG = 4,
  HL_STATUS_IO = 5,
  HL_STATUS_NUMERICAL = 6,
  HL_STATUS_HYPOTHESIS = 7,
  HL_STATUS_PANIC = 8,
} HlStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct HlConfig HlConfig;

/**
 * Opaque result of a suite run.
 */
typedef struct HlReport HlReport;

/**
 * Distance to a moving center and its first two time derivatives.
 */
typedef struct HlKinematics {
  double rho;
  double rho_t;
  double rho_tt;
} HlKinematics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * NUL-terminated). Returns the full message length in bytes, 0 if none.
 *
 * # Safety
 * `buf` must point to `len` writable bytes or be null.
 */
size_t hl_last_error_message(char *buf, size_t len);

/**
 * Default configuration for the named suite.
 *
 * # Safety
 * `suite` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_config_new(const char *suite, struct HlConfig **out);

/**
 * Parses a TOML configuration.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_config_from_toml(const char *text, struct HlConfig **out);

/**
 * # Safety
 * `cfg` must be a live handle from `hl_config_new` or `hl_config_from_toml`.
 */
enum HlStatus hl_config_set_seed(struct HlConfig *cfg, uint64_t seed);

/**
 * Releases a configuration. Null is ignored.
 *
 * # Safety
 * `cfg` must be null or a live handle not used afterwards.
 */
void hl_config_free(struct HlConfig *cfg);

/**
 * Runs the configured suite, writing report.json, metadata.json and the
 * CSV tables into `out_dir`.
 *
 * # Safety
 * `cfg` must be a live handle, `out_dir` a NUL-terminated path and `out`
 * writable.
 */
enum HlStatus hl_run(const struct HlConfig *cfg, const char *out_dir, struct HlReport **out);

/**
 * Whether every section of the run passed.
 *
 * # Safety
 * `report` must be a live handle; `pass` must be writable.
 */
enum HlStatus hl_report_pass(const struct HlReport *report, bool *pass);

/**
 * The report as a JSON string; release it with `hl_string_free`.
 *
 * # Safety
 * `report` must be a live handle; `json` must be writable.
 */
enum HlStatus hl_report_json(const struct HlReport *report, char **json);

/**
 * # Safety
 * `report` must be null or a live handle not used afterwards.
 */
void hl_report_free(struct HlReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void hl_string_free(char *s);

/**
 * Delta^2 (rho^2) on n-dimensional hyperbolic space at radius `rho`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HlStatus hl_bilaplacian_rho_squared(size_t n, double rho, double *out);

/**
 * Hyperbolic distance between two points of the plane in polar coordinates.
 *
 * # Safety
 * `out` must be writable.
 */
enum HlStatus hl_polar2_distance(double rho1,
                                 double theta1,
                                 double rho2,
                                 double theta2,
                                 double *out);

/**
 * Distance from the plane point (rho, theta) to the moving center of
 * amplitude `r` at time `t`, with its time derivatives.
 *
 * # Safety
 * `out` must be writable.
 */
enum HlStatus hl_moving_center_kinematics(double rho,
                                          double theta,
                                          double r,
                                          double t,
                                          struct HlKinematics *out);

/**
 * Ratio of the Laplace integral to its leading-order asymptotic.
 *
 * # Safety
 * `out` must be writable.
 */
enum HlStatus hl_asymptotic_ratio(double sigma, double rho, double gamma0, double *out);

/**
 * Quadratic-log exponent Q(ell, r) and the residual of its defining relation.
 *
 * # Safety
 * `q` and `residual` must be writable.
 */
enum HlStatus hl_q_exponent(uint32_t ell, double r, double *q, double *residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERLAB_H */
