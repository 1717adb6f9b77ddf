#ifndef HAMCHAOS_H
#define HAMCHAOS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_ARGUMENT = 2,
  HC_STATUS_OUT_OF_CHART = 3,
  HC_STATUS_NUMERICAL = 4,
  HC_STATUS_CONFIG = 5,
  HC_STATUS_IO = 6,
  HC_STATUS_NOT_FOUND = 7,
  HC_STATUS_PANIC = 8,
} HcStatus;

/**
 * Opaque map handle.
 */
typedef struct HcMap HcMap;

/**
 * Opaque handle over the reports of one scenario run.
 */
typedef struct HcReport HcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *hc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hc_version(void);

/**
 * Standard map on the unit torus with kick strength `k`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HcStatus hc_map_standard(double k, struct HcMap **out);

/**
 * Stadium billiard with straight-edge parameter `gamma` (unit radius).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HcStatus hc_map_stadium(double gamma, struct HcMap **out);

/**
 * The baker map on the unit square.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HcStatus hc_map_baker(struct HcMap **out);

/**
 * # Safety
 * `map` must be null or a handle from one of the `hc_map_*` constructors,
 * not yet freed.
 */
void hc_map_free(struct HcMap *map);

/**
 * One step of the map. `action` may be null.
 *
 * # Safety
 * `map` must be a live handle; `q_out` and `p_out` must be writable.
 */
enum HcStatus hc_map_step(const struct HcMap *map,
                          double q,
                          double p,
                          double *q_out,
                          double *p_out,
                          double *action);

/**
 * Propagate `n` steps and write the tangent matrix of the composite map to
 * `jacobian` as `[dq/dq, dq/dp, dp/dq, dp/dp]`.
 *
 * # Safety
 * `map` must be a live handle; `q_out`, `p_out` must be writable and
 * `jacobian` must point to four writable doubles.
 */
enum HcStatus hc_map_jacobian(const struct HcMap *map,
                              double q,
                              double p,
                              size_t n,
                              double *q_out,
                              double *p_out,
                              double *jacobian);

/**
 * Write the orbit `x_0 .. x_n` into `qs` and `ps`, each of length `n + 1`.
 *
 * # Safety
 * `map` must be a live handle; `qs` and `ps` must each hold `n + 1` doubles.
 */
enum HcStatus hc_map_orbit(const struct HcMap *map,
                           double q,
                           double p,
                           size_t n,
                           double *qs,
                           double *ps);

/**
 * Run scenario file text. `out_dir` may be null to skip artifacts.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `out_dir` null or NUL-terminated,
 * and `out` writable.
 */
enum HcStatus hc_scenario_run_text(const char *text,
                                   const char *out_dir,
                                   bool assert,
                                   struct HcReport **out);

/**
 * Run one built-in catalog scenario by name.
 *
 * # Safety
 * As for [`hc_scenario_run_text`], with `name` NUL-terminated.
 */
enum HcStatus hc_catalog_run(const char *name,
                             const char *out_dir,
                             bool assert,
                             struct HcReport **out);

/**
 * # Safety
 * `report` must be null or a live report handle.
 */
void hc_report_free(struct HcReport *report);

/**
 * Number of scenarios in the report; 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live report handle.
 */
size_t hc_report_len(const struct HcReport *report);

/**
 * Number of failed checks across all scenarios; 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live report handle.
 */
size_t hc_report_failed(const struct HcReport *report);

/**
 * Look up metric `name` of scenario `index`.
 *
 * # Safety
 * `report` must be a live handle, `name` NUL-terminated, `value` writable.
 */
enum HcStatus hc_report_metric(const struct HcReport *report,
                               size_t index,
                               const char *name,
                               double *value);

/**
 * Formatted results table of scenario `index`, or null if out of range.
 * Release with [`hc_string_free`].
 *
 * # Safety
 * `report` must be null or a live report handle.
 */
char *hc_report_table(const struct HcReport *report, size_t index);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void hc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAMCHAOS_H */
