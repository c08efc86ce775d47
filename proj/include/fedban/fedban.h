// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the simulator. All functions return a fedban_status; on
 * failure fedban_last_error() describes the problem for the calling thread.
 * Handles are opaque and owned by the caller until passed to their _free
 * function. Strings returned through char** are freed with
 * fedban_string_free. */
#ifndef FEDBAN_FEDBAN_H_
#define FEDBAN_FEDBAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(FEDBAN_BUILDING_LIBRARY)
#define FEDBAN_API __attribute__((visibility("default")))
#else
#define FEDBAN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fedban_status {
  FEDBAN_OK = 0,
  FEDBAN_ERR_DIMENSION_MISMATCH = 1,
  FEDBAN_ERR_NOT_POSITIVE_DEFINITE = 2,
  FEDBAN_ERR_ARM_NOT_IN_SET = 3,
  FEDBAN_ERR_EMPTY_ARM_SET = 4,
  FEDBAN_ERR_UNKNOWN_CLIENT_ID = 5,
  FEDBAN_ERR_ALREADY_SELECTED = 6,
  FEDBAN_ERR_NOT_SELECTED = 7,
  FEDBAN_ERR_INFEASIBLE = 8,
  FEDBAN_ERR_TOO_MANY_CLIENTS = 9,
  FEDBAN_ERR_NON_MONOTONE_DETECTED = 10,
  FEDBAN_ERR_COMPLEXITY_BOUND_EXCEEDED = 11,
  FEDBAN_ERR_NON_POSITIVE_REPORT = 12,
  FEDBAN_ERR_CONFIG_INVALID = 13,
  FEDBAN_ERR_IO = 14,
  FEDBAN_ERR_INVALID_ARGUMENT = 15,
  FEDBAN_ERR_INTERNAL = 16
} fedban_status;

typedef struct fedban_config fedban_config;
typedef struct fedban_result fedban_result;

FEDBAN_API const char* fedban_version(void);
FEDBAN_API const char* fedban_status_name(fedban_status status);
/* Message of the last failed call on this thread; "" if none. */
FEDBAN_API const char* fedban_last_error(void);
FEDBAN_API void fedban_string_free(char* s);

/* Configuration. */
FEDBAN_API fedban_status fedban_config_default(fedban_config** out);
FEDBAN_API fedban_status fedban_config_from_json(const char* json,
                                                 fedban_config** out);
FEDBAN_API fedban_status fedban_config_load(const char* path,
                                            fedban_config** out);
/* Replaces one key with a JSON value, e.g. ("T", "1000"),
 * ("mechanism", "\"vanilla_greedy\"") or ("oracle.trials", "50"), and
 * revalidates. The handle is left
 * unchanged on failure. */
FEDBAN_API fedban_status fedban_config_set(fedban_config* config,
                                           const char* key,
                                           const char* json_value);
FEDBAN_API fedban_status fedban_config_to_json(const fedban_config* config,
                                               char** out);
FEDBAN_API void fedban_config_free(fedban_config* config);

/* Experiments. Each writes an output tree under out_dir (created if needed;
 * existing files are overwritten). */
FEDBAN_API fedban_status fedban_run(const fedban_config* config,
                                    const char* out_dir);
FEDBAN_API fedban_status fedban_compare(const fedban_config* config,
                                        const char* out_dir);
FEDBAN_API fedban_status fedban_micro(const fedban_config* config,
                                      const char* out_dir);
FEDBAN_API fedban_status fedban_macro(const fedban_config* config,
                                      const char* out_dir);
/* Property suite from the config's "oracle" section. *passed is 1 when every
 * property held. out_dir may be NULL; report_json may be NULL. */
FEDBAN_API fedban_status fedban_oracle(const fedban_config* config,
                                       const char* out_dir, int* passed,
                                       char** report_json);

/* One simulation of the configured mechanism with the given seed. */
FEDBAN_API fedban_status fedban_simulate(const fedban_config* config,
                                         uint64_t seed, fedban_result** out);
FEDBAN_API size_t fedban_result_steps(const fedban_result* result);
FEDBAN_API size_t fedban_result_rounds(const fedban_result* result);
FEDBAN_API size_t fedban_result_clients(const fedban_result* result);
/* metric: "regret", "communication", "incentive" or "social_cost". The
 * array stays valid until the result is freed. */
FEDBAN_API fedban_status fedban_result_series(const fedban_result* result,
                                              const char* metric,
                                              const double** data,
                                              size_t* length);
FEDBAN_API fedban_status fedban_result_client_utility(
    const fedban_result* result, size_t client, double* out);
/* Round log as JSON lines. */
FEDBAN_API fedban_status fedban_result_round_log(const fedban_result* result,
                                                 char** out);
FEDBAN_API void fedban_result_free(fedban_result* result);

/* Closed-form quantities. */
FEDBAN_API fedban_status fedban_default_dc(size_t horizon, size_t num_clients,
                                           size_t dim, double ridge,
                                           double beta, double* out);
FEDBAN_API fedban_status fedban_beta_bound(double t, double arm_norm_bound,
                                           double ridge, size_t dim,
                                           double* out);

#ifdef __cplusplus
}
#endif

#endif /* FEDBAN_FEDBAN_H_ */
