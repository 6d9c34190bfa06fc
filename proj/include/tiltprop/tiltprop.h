#ifndef TILTPROP_TILTPROP_H
#define TILTPROP_TILTPROP_H

/*
 * C interface of the tilted-frame paraxial beam solver.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every call returns a tp_status; on failure tp_last_error() describes the
 * problem for the calling thread. Strings returned through char** are owned
 * by the caller and released with tp_string_free.
 */

#include <stddef.h>

#if defined(_WIN32)
#define TP_API __declspec(dllexport)
#else
#define TP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tp_status {
  TP_OK = 0,
  TP_ERR_INVALID_ARGUMENT = 1,
  TP_ERR_CONFIG = 2,
  TP_ERR_BLOWUP = 3,
  TP_ERR_IO = 4,
  TP_ERR_INTERNAL = 5
} tp_status;

typedef struct tp_config tp_config;
typedef struct tp_run tp_run;
typedef struct tp_table tp_table;

typedef struct tp_metrics {
  double max_energy;
  double max_x;
  double max_y;
  double focusing_distance;
  double total_energy;
  double beam_center;
  double entrance_energy;
  double exit_energy;
  size_t max_step;
  size_t n_x;
  size_t n_y;
  size_t rays;
} tp_metrics;

typedef struct tp_comparison {
  double energy_error;
  double focusing_error;
  double max_energy_error;
} tp_comparison;

typedef struct tp_energy_balance {
  double absorbed;
  double boundary;
  double prop1_bound;
  int prop1_holds;
  double layer_loss;
  double outgoing;
  double spectral_excess;
  double residual;
  double closed_residual;
} tp_energy_balance;

/* Errors. */
TP_API const char* tp_last_error(void);
/* Configuration key behind the last TP_ERR_CONFIG, or "". */
TP_API const char* tp_last_error_key(void);
/* Step index behind the last TP_ERR_BLOWUP. */
TP_API size_t tp_last_error_step(void);
TP_API const char* tp_status_name(tp_status status);
TP_API void tp_string_free(char* s);

/* Configuration. */
TP_API tp_status tp_config_parse(const char* text, tp_config** out);
TP_API tp_status tp_config_load(const char* path, tp_config** out);
/* Replaces one key (an empty value removes it) and revalidates. The
 * configuration is left unchanged on failure. */
TP_API tp_status tp_config_set(tp_config* config, const char* key, const char* value);
TP_API tp_status tp_config_serialize(const tp_config* config, char** out);
TP_API size_t tp_config_warning_count(const tp_config* config);
TP_API const char* tp_config_warning(const tp_config* config, size_t index);
TP_API size_t tp_config_beam_count(const tp_config* config);
TP_API double tp_config_cfl(const tp_config* config, size_t beam);
TP_API const char* tp_config_output_dir(const tp_config* config);
TP_API void tp_config_free(tp_config* config);

/* Runs. tp_simulate marches one ray, or two when a second beam is set. */
TP_API tp_status tp_simulate(const tp_config* config, tp_run** out);
TP_API tp_status tp_run_metrics(const tp_run* run, tp_metrics* out);
TP_API size_t tp_run_station_count(const tp_run* run);
/* E^n and the interior maximum of |u|^2 on station n. */
TP_API double tp_run_station_energy(const tp_run* run, size_t n);
TP_API double tp_run_station_max(const tp_run* run, size_t n);
TP_API tp_status tp_run_energy_balance(const tp_run* run, tp_energy_balance* out);
TP_API tp_status tp_run_write_outputs(const tp_run* run, const char* out_dir);
/* Nested grids are compared node by node, other grids through bilinear
 * interpolation of the reference. */
TP_API tp_status tp_compare(const tp_run* coarse, const tp_run* reference,
                            tp_comparison* out);
TP_API void tp_run_free(tp_run* run);

/* Sweeps. Each returns a table; see the README for the columns. */
TP_API tp_status tp_converge(const tp_config* base, const double* meshes, size_t count,
                             double reference_mesh, tp_table** out);
TP_API tp_status tp_cfl_sweep(const tp_config* base, const double* cfls, size_t count,
                              int order, const char* limiter, double delta_y,
                              double reference_mesh, tp_table** out);
TP_API tp_status tp_layer_sweep(const tp_config* base, const double* b, size_t b_count,
                                const double* beta, size_t beta_count, double mesh,
                                tp_table** out);
TP_API tp_status tp_nu_split_sweep(const tp_config* base, double nu_total,
                                   const double* ratios, size_t count, tp_table** out);
TP_API tp_status tp_angle_sweep(const tp_config* base, const double* angles,
                                const double* dx, const double* dy, size_t count,
                                double reference_focus, double reference_max,
                                tp_table** out);
TP_API tp_status tp_two_ray(const tp_config* config, tp_table** out);
TP_API tp_status tp_limits_check(const tp_config* config, tp_table** out);

/* Tables. */
TP_API size_t tp_table_rows(const tp_table* table);
TP_API size_t tp_table_columns(const tp_table* table);
TP_API const char* tp_table_column_name(const tp_table* table, size_t column);
TP_API double tp_table_value(const tp_table* table, size_t row, size_t column);
TP_API tp_status tp_table_csv(const tp_table* table, char** out);
TP_API void tp_table_free(tp_table* table);

#ifdef __cplusplus
}
#endif

#endif
