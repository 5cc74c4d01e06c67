/*
 * leveralign C API.
 *
 * Every function returns an la_status. On failure, la_last_error() returns a
 * message for the calling thread, valid until that thread's next API call.
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function.
 */

#ifndef LEVERALIGN_H
#define LEVERALIGN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LA_API __declspec(dllexport)
#else
#define LA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum la_status {
  LA_OK = 0,
  LA_ERR_INVALID_ARGUMENT = 1, /* null pointer, out-of-range numeric input */
  LA_ERR_CONFIG = 2,           /* config parse or validation failure */
  LA_ERR_DEGENERATE = 3,       /* observation geometry does not fix the attitude */
  LA_ERR_IO = 4,               /* file could not be read or written */
  LA_ERR_INTERNAL = 5          /* any other failure */
} la_status;

typedef struct la_config la_config;

LA_API const char* la_status_string(la_status status);
LA_API const char* la_last_error(void);

/* Key named by the last LA_ERR_CONFIG on this thread, or "" when none. */
LA_API const char* la_last_error_key(void);

LA_API la_status la_config_default(la_config** out);
LA_API la_status la_config_load(const char* path, la_config** out);
LA_API la_status la_config_parse(const char* text, la_config** out);
LA_API void la_config_free(la_config* config);

/* Same key names and value syntax as a config file line. */
LA_API la_status la_config_set(la_config* config, const char* key, const char* value);

/* Copies the effective-config dump (NUL-terminated) into buf when it fits;
 * *needed receives the required size including the terminator. */
LA_API la_status la_config_dump(const la_config* config, char* buf, size_t size, size_t* needed);

/* Commands. Outputs go to the config's output_dir. */
LA_API la_status la_run_single(const la_config* config, uint64_t run_index);
LA_API la_status la_run_monte_carlo(const la_config* config);
LA_API la_status la_report_remarks(const la_config* config);
LA_API la_status la_export_streams(const la_config* config, uint64_t run_index);

/*
 * Weighted Wahba solution: the rotation c (row-major 3x3) minimizing
 * sum w_i |alpha_i - c beta_i|^2. alpha and beta hold n packed 3-vectors,
 * weights may be NULL for unit weights. On LA_ERR_DEGENERATE, axis_out (if
 * not NULL) receives the unobservable rotation axis in the beta frame.
 */
LA_API la_status la_solve_attitude(const double* alpha, const double* beta, const double* weights, size_t n,
                                   double c_out[9], double axis_out[3]);

#ifdef __cplusplus
}
#endif

#endif /* LEVERALIGN_H */
