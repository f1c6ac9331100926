/* C interface to the risopt library. All functions return a risopt_status;
 * on failure risopt_last_error() describes the problem for the calling
 * thread. Handles are opaque and released with their _free function;
 * strings returned through `const char**` stay valid until the owning handle
 * is freed or the same call is made again on it. */
#ifndef RISOPT_RISOPT_H
#define RISOPT_RISOPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RISOPT_API __declspec(dllexport)
#else
#define RISOPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum risopt_status {
  RISOPT_OK = 0,
  RISOPT_ERR_DIMENSION = 1,
  RISOPT_ERR_SYMMETRY = 2,
  RISOPT_ERR_SINGULAR = 3,
  RISOPT_ERR_FEASIBILITY = 4,
  RISOPT_ERR_PARSE = 5,
  RISOPT_ERR_IO = 6,
  RISOPT_ERR_CAPACITY = 7,
  RISOPT_ERR_INVALID_ARGUMENT = 8,
  RISOPT_ERR_NUMERICAL = 9,
  RISOPT_ERR_INTERNAL = 10
} risopt_status;

typedef struct risopt_channels risopt_channels;
typedef struct risopt_problem risopt_problem;
typedef struct risopt_experiment risopt_experiment;
typedef struct risopt_table risopt_table;

RISOPT_API const char* risopt_version(void);
RISOPT_API const char* risopt_last_error(void);
RISOPT_API const char* risopt_status_name(risopt_status status);

/* Channels. fading is "rayleigh" or "rician". */
RISOPT_API risopt_status risopt_channels_sample(size_t M, size_t N, size_t K, const char* fading,
                                                double k_factor, uint64_t seed, double noise_power,
                                                risopt_channels** out);
RISOPT_API risopt_status risopt_channels_load(const char* path, risopt_channels** out);
RISOPT_API risopt_status risopt_channels_save(const risopt_channels* channels, const char* path);
RISOPT_API risopt_status risopt_channels_fingerprint(const risopt_channels* channels,
                                                     uint64_t* out);
RISOPT_API void risopt_channels_free(risopt_channels* channels);

/* Problems. kind is "secrecy", "uplink_power" or "network_cost"; params_json
 * holds the kind's parameters (may be NULL for defaults). Phase vectors are
 * passed as interleaved (re, im) pairs of length 2*M. */
RISOPT_API risopt_status risopt_problem_create(const char* kind, const risopt_channels* channels,
                                               const char* params_json, risopt_problem** out);
RISOPT_API risopt_status risopt_problem_update_x(risopt_problem* problem, const double* e);
RISOPT_API risopt_status risopt_problem_objective(const risopt_problem* problem, const double* e,
                                                  double* out);
/* Runs the BCD loop from the all-ones phase; solver_json selects the e-solver
 * and its settings, e.g. {"method": "manifold", "seed": 1}. The report is the
 * problem's JSON run record. */
RISOPT_API risopt_status risopt_problem_run_bcd(risopt_problem* problem, const char* solver_json,
                                                const char** report_json);
RISOPT_API void risopt_problem_free(risopt_problem* problem);

/* Experiments. threads/seed overrides apply when >= 0 / when has_seed != 0. */
RISOPT_API risopt_status risopt_experiment_load(const char* path, risopt_experiment** out);
RISOPT_API risopt_status risopt_experiment_parse(const char* text, risopt_experiment** out);
RISOPT_API risopt_status risopt_experiment_override(risopt_experiment* experiment, int threads,
                                                    int has_seed, uint64_t seed);
/* Output settings named in the config; NULL or empty when absent. */
RISOPT_API const char* risopt_experiment_output_path(const risopt_experiment* experiment);
RISOPT_API const char* risopt_experiment_format(const risopt_experiment* experiment);
/* mode is "run", "scale", "quantize-study" or "oracle-check". */
RISOPT_API risopt_status risopt_experiment_execute(const risopt_experiment* experiment,
                                                   const char* mode, risopt_table** out);
RISOPT_API void risopt_experiment_free(risopt_experiment* experiment);

RISOPT_API size_t risopt_table_rows(const risopt_table* table);
/* format is "csv" or "json". */
RISOPT_API risopt_status risopt_table_write(const risopt_table* table, const char* format,
                                            const char* path);
RISOPT_API risopt_status risopt_table_render(risopt_table* table, const char* format,
                                             const char** out);
/* Mode-specific summary (slopes, oracle tallies) as a JSON object. */
RISOPT_API const char* risopt_table_summary(const risopt_table* table);
RISOPT_API void risopt_table_free(risopt_table* table);

#ifdef __cplusplus
}
#endif

#endif /* RISOPT_RISOPT_H */
