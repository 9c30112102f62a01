/* SPDX-License-Identifier: Apache-2.0 */
#ifndef WEYLAB_WEYLAB_H
#define WEYLAB_WEYLAB_H

#include <stddef.h>

#if defined(WEYLAB_BUILDING_LIBRARY)
#define WEYLAB_API __attribute__((visibility("default")))
#else
#define WEYLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum weylab_status {
  WEYLAB_OK = 0,
  WEYLAB_E_INVALID_ARGUMENT = 1,
  WEYLAB_E_DIMENSION_MISMATCH = 2,
  WEYLAB_E_EVALUATION_FAULT = 3,
  WEYLAB_E_OUT_OF_DOMAIN = 4,
  WEYLAB_E_CONFIG = 5,
  WEYLAB_E_RESOLUTION = 6,
  WEYLAB_E_CONFINEMENT = 7,
  WEYLAB_E_CONTAINMENT = 8,
  WEYLAB_E_NUMERICAL = 9,
  WEYLAB_E_INCOMPLETE = 10,
  WEYLAB_E_HYPOTHESIS = 11,
  WEYLAB_E_DEGENERATE = 12,
  WEYLAB_E_IO = 13,
  WEYLAB_E_UNKNOWN_EXPERIMENT = 14,
  WEYLAB_E_INTERNAL = 99
} weylab_status;

typedef struct weylab_config weylab_config;
typedef struct weylab_result weylab_result;

WEYLAB_API const char* weylab_version(void);
WEYLAB_API const char* weylab_status_name(weylab_status status);
/* Message of the last failed call on this thread; empty when none. */
WEYLAB_API const char* weylab_last_error(void);

WEYLAB_API size_t weylab_experiment_count(void);
WEYLAB_API const char* weylab_experiment_name(size_t index);

/* Parses a key = value document. An empty or NULL experiment skips experiment-specific rules. */
WEYLAB_API weylab_status weylab_config_parse(const char* text, const char* experiment,
                                             weylab_config** out);
WEYLAB_API weylab_status weylab_config_default(const char* experiment, weylab_config** out);
/* Replaces one key; an empty value removes an optional key. */
WEYLAB_API weylab_status weylab_config_set(weylab_config* config, const char* key,
                                           const char* value);
/* Copies the emitted document into buffer when it fits; *needed receives its size plus one. */
WEYLAB_API weylab_status weylab_config_emit(const weylab_config* config, char* buffer,
                                            size_t capacity, size_t* needed);
WEYLAB_API void weylab_config_free(weylab_config* config);

WEYLAB_API weylab_status weylab_run(const weylab_config* config, const char* experiment,
                                    weylab_result** out);
/* 0 when every acceptance check of the experiment passed, 1 otherwise. */
WEYLAB_API int weylab_result_exit_status(const weylab_result* result);
/* "PASS", "FAIL" or "PARTIAL". */
WEYLAB_API const char* weylab_result_status(const weylab_result* result);
WEYLAB_API const char* weylab_result_verdict_json(const weylab_result* result);
WEYLAB_API size_t weylab_result_file_count(const weylab_result* result);
WEYLAB_API const char* weylab_result_file_name(const weylab_result* result, size_t index);
WEYLAB_API const char* weylab_result_file_content(const weylab_result* result, size_t index);
WEYLAB_API weylab_status weylab_result_write(const weylab_result* result, const char* directory);
WEYLAB_API void weylab_result_free(weylab_result* result);

#ifdef __cplusplus
}
#endif

#endif /* WEYLAB_WEYLAB_H */
