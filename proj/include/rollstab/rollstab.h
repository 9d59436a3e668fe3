/* SPDX-License-Identifier: Apache-2.0 */
#ifndef ROLLSTAB_ROLLSTAB_H
#define ROLLSTAB_ROLLSTAB_H

#include <stddef.h>

#if defined(_WIN32)
#define RS_API __declspec(dllexport)
#else
#define RS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes of every call. The first four double as process exit codes. */
typedef enum rs_status {
  RS_OK = 0,
  RS_CRITERION_FAILED = 1,
  RS_INVALID_ARGUMENT = 2,
  RS_DIVERGENCE = 3,
  RS_NUMERICAL = 4,
  RS_IO = 5,
  RS_BUFFER_TOO_SMALL = 6,
  RS_INTERNAL = 7
} rs_status;

typedef struct rs_config rs_config;
typedef struct rs_result rs_result;

RS_API const char* rs_version(void);
RS_API const char* rs_status_name(rs_status s);
/* Message of the last failing call on this thread; "" when none. */
RS_API const char* rs_last_error(void);

/* String outputs follow one convention: the text plus its terminating NUL is
 * copied into buf when cap suffices; *needed (if non-NULL) always receives the
 * required capacity; RS_BUFFER_TOO_SMALL is returned otherwise. */

/* Configuration for one command: spectrum, kernel, simulate, toy, verify-all. */
RS_API rs_status rs_config_create(const char* command, rs_config** out);
RS_API void rs_config_destroy(rs_config* cfg);
/* Key-value file applied below the overrides. */
RS_API rs_status rs_config_set_file(rs_config* cfg, const char* path);
RS_API rs_status rs_config_set(rs_config* cfg, const char* key, const char* value);
/* Resolves defaults, preset, file and overrides, and validates the result. */
RS_API rs_status rs_config_resolve(rs_config* cfg);
RS_API rs_status rs_config_get(const rs_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
/* The resolved configuration as "key = value" lines. */
RS_API rs_status rs_config_dump(const rs_config* cfg, char* buf, size_t cap, size_t* needed);
/* Newline-separated preset names. */
RS_API rs_status rs_preset_names(char* buf, size_t cap, size_t* needed);

/* Runs the command (resolving first if needed). On RS_OK the command reached
 * a verdict, reported by rs_result_exit_code. Other statuses describe errors;
 * *out is still created when non-NULL so the exit code can be read. */
RS_API rs_status rs_run(rs_config* cfg, rs_result** out);
RS_API int rs_result_exit_code(const rs_result* res);
RS_API rs_status rs_result_summary(const rs_result* res, char* buf, size_t cap, size_t* needed);
RS_API rs_status rs_result_out_dir(const rs_result* res, char* buf, size_t cap, size_t* needed);
RS_API void rs_result_destroy(rs_result* res);

/* Direct numerics. */
RS_API rs_status rs_spectrally_stable(double q, double D, double gamma, int* stable);
/* Curvatures of the critical eigenvalues at k = 0 as (re+, im+, re-, im-). */
RS_API rs_status rs_lambda1(double q, double D, double gamma, double out[4]);
/* Largest real part of the symbol's eigenvalues at wavenumber k. */
RS_API rs_status rs_max_real_eigenvalue(double q, double D, double gamma, double k, double* out);

#ifdef __cplusplus
}
#endif

#endif /* ROLLSTAB_ROLLSTAB_H */
