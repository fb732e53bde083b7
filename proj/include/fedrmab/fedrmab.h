#pragma once

/// C interface to the fedrmab simulator. All functions return a status code;
/// on failure fedrmab_last_error() describes the problem (per thread).

#include <stddef.h>
#include <stdint.h>

#if defined(FEDRMAB_BUILDING_LIBRARY)
#define FEDRMAB_API __attribute__((visibility("default")))
#else
#define FEDRMAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fedrmab_status {
    FEDRMAB_OK = 0,
    FEDRMAB_ERR_INVALID_ARGUMENT = 1,
    FEDRMAB_ERR_CONFIG = 2,
    FEDRMAB_ERR_RUNTIME = 3,
    FEDRMAB_ERR_IO = 4,
    FEDRMAB_ERR_NETWORK = 5
} fedrmab_status;

typedef struct fedrmab_config fedrmab_config;
/// Text produced by a run (CSV) or a serialization call.
typedef struct fedrmab_result fedrmab_result;

FEDRMAB_API const char* fedrmab_version(void);
/// Message of the last failed call on this thread; "" if none.
FEDRMAB_API const char* fedrmab_last_error(void);

/* configs */
FEDRMAB_API fedrmab_status fedrmab_config_from_string(const char* json_text, fedrmab_config** out);
FEDRMAB_API fedrmab_status fedrmab_config_from_file(const char* path, fedrmab_config** out);
/// The four-arm reference instance (M = 4, K = 2, 50 episodes).
FEDRMAB_API fedrmab_status fedrmab_config_builtin(fedrmab_config** out);
FEDRMAB_API fedrmab_status fedrmab_config_clone(const fedrmab_config* cfg, fedrmab_config** out);
FEDRMAB_API void fedrmab_config_free(fedrmab_config* cfg);

/// Integer keys: agents, k, episodes, horizon, seed, trials, threads, rho_ref_slots.
FEDRMAB_API fedrmab_status fedrmab_config_set_uint(fedrmab_config* cfg, const char* key, uint64_t value);
/// Policy names: fedtswi, wi-known, myopic-known, fedts-myopic, feducb-wi, feducb-myopic, random, fixed.
FEDRMAB_API fedrmab_status fedrmab_config_set_policy(fedrmab_config* cfg, const char* name);
FEDRMAB_API fedrmab_status fedrmab_config_set_known_dynamics(fedrmab_config* cfg, int known);
FEDRMAB_API fedrmab_status fedrmab_config_set_rho_ref(fedrmab_config* cfg, double rho_ref);
FEDRMAB_API fedrmab_status fedrmab_config_get_uint(const fedrmab_config* cfg, const char* key, uint64_t* out);
FEDRMAB_API fedrmab_status fedrmab_config_hash(const fedrmab_config* cfg, uint64_t* out);
FEDRMAB_API fedrmab_status fedrmab_config_to_json(const fedrmab_config* cfg, fedrmab_result** out);

/* experiments; each produces CSV with a header row */
FEDRMAB_API fedrmab_status fedrmab_run(const fedrmab_config* cfg, fedrmab_result** out);
FEDRMAB_API fedrmab_status fedrmab_compare(const fedrmab_config* cfg, const char* const* policies, size_t count,
                                           fedrmab_result** out);
/// Repeats the run with `param` ("agents" or "k") set to each value; rows are labelled policy@param=value.
FEDRMAB_API fedrmab_status fedrmab_sweep(const fedrmab_config* cfg, const char* param, const uint64_t* values,
                                         size_t count, fedrmab_result** out);
/// CSV b, W_closed, W_numeric, abs_diff on `grid` evenly spaced beliefs in [0, 1].
FEDRMAB_API fedrmab_status fedrmab_whittle_table(double theta01, double theta11, double rate, size_t grid,
                                                 double tol, fedrmab_result** out);
FEDRMAB_API fedrmab_status fedrmab_whittle_closed(double theta01, double theta11, double rate, double belief,
                                                  double* out);
FEDRMAB_API fedrmab_status fedrmab_whittle_numeric(double theta01, double theta11, double rate, double belief,
                                                   double tol, double* out);

/* federation over TCP */
typedef void (*fedrmab_listening_fn)(uint16_t port, void* user);
/// Blocks until the run completes. `bind` is host:port (port 0 picks a free one).
FEDRMAB_API fedrmab_status fedrmab_serve(const fedrmab_config* cfg, const char* bind, int join_timeout_ms,
                                         fedrmab_listening_fn on_listening, void* user, fedrmab_result** out);
FEDRMAB_API fedrmab_status fedrmab_agent_run(const fedrmab_config* cfg, const char* server, size_t agent_id,
                                             uint64_t master_seed);

/* results */
FEDRMAB_API const char* fedrmab_result_text(const fedrmab_result* result);
FEDRMAB_API size_t fedrmab_result_size(const fedrmab_result* result);
FEDRMAB_API void fedrmab_result_free(fedrmab_result* result);

#ifdef __cplusplus
}
#endif
