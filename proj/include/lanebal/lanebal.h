#ifndef LANEBAL_LANEBAL_H
#define LANEBAL_LANEBAL_H

/*
 * lanebal C API.
 *
 * Lane placement and analytic multi-accelerator timing behind opaque handles.
 * Every fallible call returns an lb_status; on failure lb_last_error() gives a
 * message for the calling thread, valid until that thread's next API call.
 * Strings returned through char** out-parameters are owned by the caller and
 * released with lb_string_free(). Handles are immutable after creation except
 * through the lb_scenario_set_* calls, and are safe to share across threads
 * for read-only use.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LANEBAL_BUILDING)
#    define LANEBAL_API __declspec(dllexport)
#  else
#    define LANEBAL_API __declspec(dllimport)
#  endif
#else
#  define LANEBAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the lanebal CLI exit codes. */
typedef enum lb_status {
  LB_OK = 0,
  LB_ERR_INPUT = 2,        /* unreadable or malformed input, unknown names */
  LB_ERR_INVARIANT = 3,    /* input parsed but violates a domain invariant */
  LB_ERR_SOLVER_LIMIT = 4, /* exact solver refused an oversized instance */
  LB_ERR_INTERNAL = 70
} lb_status;

typedef enum lb_strategy {
  LB_STRATEGY_GREEDY = 0,
  LB_STRATEGY_RANDOM = 1,
  LB_STRATEGY_ROUND_ROBIN = 2,
  LB_STRATEGY_EXACT = 3
} lb_strategy;

typedef enum lb_greedy_rule {
  LB_GREEDY_INCREMENT = 0, /* minimize load + lane time on the device */
  LB_GREEDY_EMPTIEST = 1   /* least-loaded device before placing */
} lb_greedy_rule;

typedef enum lb_mode {
  LB_MODE_MODEL_PARALLEL = 0,
  LB_MODE_DATA_PARALLEL = 1
} lb_mode;

typedef enum lb_format {
  LB_FORMAT_CSV = 0,
  LB_FORMAT_JSON = 1
} lb_format;

typedef struct lb_scenario lb_scenario;
typedef struct lb_assignment lb_assignment;

typedef struct lb_plan_options {
  lb_strategy strategy;
  uint64_t seed;           /* random strategy only */
  lb_greedy_rule rule;     /* greedy strategy only */
  size_t exact_limit;      /* 0 selects the default (16 lanes) */
} lb_plan_options;

LANEBAL_API const char* lb_version(void);
LANEBAL_API const char* lb_last_error(void);
LANEBAL_API void lb_string_free(char* s);

/* Probe list JSON [{"device_id","runtime"}] to [{"device_id","time_factor"}]. */
LANEBAL_API lb_status lb_calibrate(const char* probes_json, char** out_factors_json);

/* JSON array of preset names. */
LANEBAL_API lb_status lb_catalog(char** out_names_json);

LANEBAL_API lb_status lb_scenario_preset(const char* name, lb_scenario** out);
LANEBAL_API lb_status lb_scenario_parse(const char* scenario_json, lb_scenario** out);
LANEBAL_API void lb_scenario_free(lb_scenario* scenario);
LANEBAL_API lb_status lb_scenario_dump(const lb_scenario* scenario, char** out_json);
LANEBAL_API size_t lb_scenario_lane_count(const lb_scenario* scenario);
LANEBAL_API size_t lb_scenario_device_count(const lb_scenario* scenario);
/* Replace the lane list ([{"id","width","depth"}]). */
LANEBAL_API lb_status lb_scenario_set_lanes(lb_scenario* scenario, const char* lanes_json);
/* Replace the devices ([{"id","time_factor","host"}]); communication constants kept. */
LANEBAL_API lb_status lb_scenario_set_devices(lb_scenario* scenario, const char* devices_json);
/* Replace devices and communication constants with those of `donor`. */
LANEBAL_API lb_status lb_scenario_set_cluster_from(lb_scenario* scenario,
                                                   const lb_scenario* donor);
LANEBAL_API lb_status lb_scenario_set_per_lane_overhead(lb_scenario* scenario,
                                                        double overhead);

LANEBAL_API lb_status lb_plan(const lb_scenario* scenario, const lb_plan_options* options,
                              lb_assignment** out);
LANEBAL_API lb_status lb_assignment_parse(const char* assignment_json, lb_assignment** out);
LANEBAL_API void lb_assignment_free(lb_assignment* assignment);
/* Assignment plus its load report evaluated against `scenario`. */
LANEBAL_API lb_status lb_assignment_dump(const lb_assignment* assignment,
                                         const lb_scenario* scenario, char** out_json);
LANEBAL_API lb_status lb_assignment_makespan(const lb_assignment* assignment,
                                             const lb_scenario* scenario,
                                             double* out_makespan);

/*
 * Simulation table, one row per scenario batch size. CSV header:
 *   scenario,mode,devices,batch,steps,step_time,epoch_time,compute,sync,network,speedup
 * JSON is an array of objects with the same keys.
 * device_count 0 uses every device in the scenario. A non-null assignment
 * (model-parallel only) fixes the placement and implies the full cluster;
 * otherwise lanes are placed greedily.
 */
LANEBAL_API lb_status lb_simulate(const lb_scenario* scenario, lb_mode mode,
                                  size_t device_count, const lb_assignment* assignment,
                                  lb_format format, char** out_table);

/* Cross product of device counts, batches and modes; rows sorted by (mode, devices, batch). */
LANEBAL_API lb_status lb_sweep(const lb_scenario* scenario,
                               const size_t* device_counts, size_t n_device_counts,
                               const int64_t* batches, size_t n_batches,
                               const lb_mode* modes, size_t n_modes,
                               lb_format format, char** out_table);

/*
 * Fit the mode's overhead constants to observed (devices, speedup) pairs and
 * write them into the scenario. out_fit_json (nullable) receives
 * {"constants", "residuals", "rms"}.
 */
LANEBAL_API lb_status lb_fit_overheads(lb_scenario* scenario, lb_mode mode,
                                       const size_t* device_counts, const double* speedups,
                                       size_t n_observations, char** out_fit_json);

/*
 * Greedy vs round-robin vs K random (vs exact when small enough) per scenario.
 * Summary CSV: one row per scenario. Runs CSV: one row per strategy run.
 * Summary JSON also carries the greedy planning wall time. Any out pointer
 * may be null.
 */
LANEBAL_API lb_status lb_bench_partition(const lb_scenario* const* scenarios,
                                         size_t n_scenarios, size_t random_seeds,
                                         char** out_summary_csv, char** out_runs_csv,
                                         char** out_summary_json);

#ifdef __cplusplus
}
#endif

#endif /* LANEBAL_LANEBAL_H */
