#ifndef TDAF_TDAF_H
#define TDAF_TDAF_H

#include <stdint.h>

#if defined(_WIN32)
#define TDAF_API __declspec(dllexport)
#else
#define TDAF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every entry point returns one of these. Nonzero codes match the error
 * categories printed by the CLI. */
typedef enum tdaf_status {
  TDAF_OK = 0,
  TDAF_ERR_CONFIG = 1,
  TDAF_ERR_STRUCTURAL = 2,
  TDAF_ERR_PARAMETER = 3,
  TDAF_ERR_SOLVER = 4,
  TDAF_ERR_NEWTON = 5,
  TDAF_ERR_IO = 6,
  TDAF_ERR_INTERNAL = 7
} tdaf_status;

typedef struct tdaf_config tdaf_config;

/* "ok", "config", "structural", "parameter", "solver", "newton", "io" or
 * "internal". Never NULL. */
TDAF_API const char* tdaf_status_name(tdaf_status status);

/* Message of the last failed call on the calling thread; "" after success.
 * Valid until the next call on the same thread. */
TDAF_API const char* tdaf_last_error(void);

TDAF_API const char* tdaf_version(void);

/* DLN coefficients for step variability eps; alpha and beta hold the
 * weights of levels (n-1, n, n+1). */
TDAF_API tdaf_status tdaf_dln_coefficients(double theta, double eps, double alpha[3], double beta[3]);

/* Step controller: doubles k_n (capped at k_max) when max(|chi_u|, |chi_T|)
 * <= delta, halves it (floored at k_min) otherwise. */
TDAF_API tdaf_status tdaf_next_step(double chi_u, double chi_T, double delta, double k_min, double k_max,
                                    double k_n, double* k_next);

/* Default configuration of a scenario (convergence-time, convergence-space,
 * cavity, adaptive-compare). */
TDAF_API tdaf_status tdaf_config_create(const char* scenario, int full_scale, tdaf_config** out);
TDAF_API void tdaf_config_destroy(tdaf_config* config);

/* Overrides the keys present in a flat JSON object. The configuration is
 * unchanged on failure. */
TDAF_API tdaf_status tdaf_config_merge_json(tdaf_config* config, const char* json);

TDAF_API tdaf_status tdaf_config_set_seed(tdaf_config* config, uint64_t seed);

/* Serializes the configuration. Free the string with tdaf_string_free. */
TDAF_API tdaf_status tdaf_config_to_json(const tdaf_config* config, char** out);

/* Runs the configured scenario and writes its output files. `summary`, when
 * not NULL, receives a JSON summary to be freed with tdaf_string_free. */
TDAF_API tdaf_status tdaf_run(const tdaf_config* config, char** summary);

TDAF_API void tdaf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
