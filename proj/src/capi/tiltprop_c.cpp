#include "tiltprop/tiltprop.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/harness.hpp"
#include "core/marching.hpp"
#include "core/output.hpp"

struct tp_config {
  tiltprop::RunConfig config;
};

struct tp_run {
  tiltprop::RunConfig config;
  tiltprop::MarchState state;
  tiltprop::RunMetrics metrics;
};

struct tp_table {
  tiltprop::Table table;
};

namespace {

struct ErrorState {
  std::string message;
  std::string key;
  std::size_t step = 0;
};

thread_local ErrorState g_error;

tp_status fail(tp_status status, std::string message, std::string key = {},
               std::size_t step = 0) {
  g_error.message = std::move(message);
  g_error.key = std::move(key);
  g_error.step = step;
  return status;
}

// Runs `body`, mapping exceptions onto status codes.
template <class F>
tp_status guarded(F&& body) {
  try {
    body();
    g_error = ErrorState{};
    return TP_OK;
  } catch (const tiltprop::ConfigError& e) {
    return fail(TP_ERR_CONFIG, e.what(), e.key());
  } catch (const tiltprop::NumericalError& e) {
    return fail(TP_ERR_BLOWUP, e.what(), {}, e.step());
  } catch (const tiltprop::IoError& e) {
    return fail(TP_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(TP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(TP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TP_ERR_INTERNAL, "unknown error");
  }
}

tp_status null_argument(const char* name) {
  return fail(TP_ERR_INVALID_ARGUMENT, std::string(name) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<double> to_vector(const double* values, size_t count) {
  if (count && !values) throw std::invalid_argument("value list is null");
  return std::vector<double>(values, values + count);
}

tp_status make_table(tp_table** out, const std::function<tiltprop::Table()>& build) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new tp_table{build()}; });
}

}  // namespace

extern "C" {

const char* tp_last_error(void) { return g_error.message.c_str(); }
const char* tp_last_error_key(void) { return g_error.key.c_str(); }
size_t tp_last_error_step(void) { return g_error.step; }

const char* tp_status_name(tp_status status) {
  switch (status) {
    case TP_OK: return "ok";
    case TP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TP_ERR_CONFIG: return "configuration error";
    case TP_ERR_BLOWUP: return "numerical blow-up";
    case TP_ERR_IO: return "i/o error";
    case TP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void tp_string_free(char* s) { std::free(s); }

tp_status tp_config_parse(const char* text, tp_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new tp_config{tiltprop::parse_config(text)}; });
}

tp_status tp_config_load(const char* path, tp_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new tp_config{tiltprop::load_config(path)}; });
}

tp_status tp_config_set(tp_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key) return null_argument("key");
  return guarded([&] {
    config->config = tiltprop::derive_config(config->config, {{key, value ? value : ""}});
  });
}

tp_status tp_config_serialize(const tp_config* config, char** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = copy_string(tiltprop::serialize_config(config->config)); });
}

size_t tp_config_warning_count(const tp_config* config) {
  return config ? config->config.warnings.size() : 0;
}

const char* tp_config_warning(const tp_config* config, size_t index) {
  if (!config || index >= config->config.warnings.size()) return nullptr;
  return config->config.warnings[index].c_str();
}

size_t tp_config_beam_count(const tp_config* config) {
  return config ? config->config.beams.size() : 0;
}

double tp_config_cfl(const tp_config* config, size_t beam) {
  if (!config || beam >= config->config.beams.size()) return std::nan("");
  return config->config.theta(beam);
}

const char* tp_config_output_dir(const tp_config* config) {
  return config ? config->config.output_dir.c_str() : nullptr;
}

void tp_config_free(tp_config* config) { delete config; }

tp_status tp_simulate(const tp_config* config, tp_run** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto run = std::make_unique<tp_run>();
    run->config = config->config;
    run->state = tiltprop::march(run->config);
    run->metrics = tiltprop::beam_metrics(run->state);
    *out = run.release();
  });
}

tp_status tp_run_metrics(const tp_run* run, tp_metrics* out) {
  if (!run) return null_argument("run");
  if (!out) return null_argument("out");
  const auto& m = run->metrics;
  const auto& g = run->state.grid;
  *out = tp_metrics{m.max_energy,
                    m.max_x,
                    m.max_y,
                    m.focusing_distance,
                    m.total_energy,
                    m.beam_center,
                    m.energy_per_step.empty() ? 0.0 : m.energy_per_step.front(),
                    m.energy_per_step.empty() ? 0.0 : m.energy_per_step.back(),
                    m.max_step,
                    g.n_x,
                    g.n_y,
                    run->state.beams.size()};
  return TP_OK;
}

size_t tp_run_station_count(const tp_run* run) {
  return run ? run->state.stations.size() : 0;
}

double tp_run_station_energy(const tp_run* run, size_t n) {
  if (!run || n >= run->state.stations.size()) return std::nan("");
  return run->state.stations[n].energy;
}

double tp_run_station_max(const tp_run* run, size_t n) {
  if (!run || n >= run->state.stations.size()) return std::nan("");
  return run->state.stations[n].max_intensity;
}

tp_status tp_run_energy_balance(const tp_run* run, tp_energy_balance* out) {
  if (!run) return null_argument("run");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto b = tiltprop::energy_balance_report(run->state, run->config);
    *out = tp_energy_balance{b.absorbed,        b.boundary,   b.prop1_bound,
                             b.prop1_holds ? 1 : 0, b.layer_loss, b.outgoing,
                             b.spectral_excess, b.residual, b.closed_residual};
  });
}

tp_status tp_run_write_outputs(const tp_run* run, const char* out_dir) {
  if (!run) return null_argument("run");
  if (!out_dir) return null_argument("out_dir");
  return guarded([&] { tiltprop::emit_outputs(run->state, run->metrics, out_dir); });
}

tp_status tp_compare(const tp_run* coarse, const tp_run* reference, tp_comparison* out) {
  if (!coarse) return null_argument("coarse");
  if (!reference) return null_argument("reference");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto r = tiltprop::compare_runs(coarse->state, reference->state);
    *out = tp_comparison{r.energy_error, r.focusing_error, r.max_energy_error};
  });
}

void tp_run_free(tp_run* run) { delete run; }

tp_status tp_converge(const tp_config* base, const double* meshes, size_t count,
                      double reference_mesh, tp_table** out) {
  if (!base) return null_argument("base");
  return make_table(out, [&] {
    return tiltprop::convergence_harness(base->config, to_vector(meshes, count),
                                         reference_mesh);
  });
}

tp_status tp_cfl_sweep(const tp_config* base, const double* cfls, size_t count, int order,
                       const char* limiter, double delta_y, double reference_mesh,
                       tp_table** out) {
  if (!base) return null_argument("base");
  return make_table(out, [&] {
    const auto kind = tiltprop::parse_limiter(limiter ? limiter : "vanleer");
    if (!kind) throw tiltprop::ConfigError("scheme.limiter", "unknown limiter");
    if (order != 1 && order != 2) throw tiltprop::ConfigError("scheme.order", "must be 1 or 2");
    return tiltprop::cfl_sweep(base->config, to_vector(cfls, count), order, *kind, delta_y,
                               reference_mesh);
  });
}

tp_status tp_layer_sweep(const tp_config* base, const double* b, size_t b_count,
                         const double* beta, size_t beta_count, double mesh,
                         tp_table** out) {
  if (!base) return null_argument("base");
  return make_table(out, [&] {
    return tiltprop::layer_sweep(base->config, to_vector(b, b_count),
                                 to_vector(beta, beta_count), mesh);
  });
}

tp_status tp_nu_split_sweep(const tp_config* base, double nu_total, const double* ratios,
                            size_t count, tp_table** out) {
  if (!base) return null_argument("base");
  return make_table(out, [&] {
    return tiltprop::nu_split_sweep(base->config, nu_total, to_vector(ratios, count));
  });
}

tp_status tp_angle_sweep(const tp_config* base, const double* angles, const double* dx,
                         const double* dy, size_t count, double reference_focus,
                         double reference_max, tp_table** out) {
  if (!base) return null_argument("base");
  return make_table(out, [&] {
    const auto a = to_vector(angles, count);
    const auto x = to_vector(dx, count);
    const auto y = to_vector(dy, count);
    std::vector<tiltprop::AngleCase> cases;
    for (size_t i = 0; i < count; ++i) cases.push_back({a[i], x[i], y[i]});
    return tiltprop::angle_sweep(base->config, cases, reference_focus, reference_max);
  });
}

tp_status tp_two_ray(const tp_config* config, tp_table** out) {
  if (!config) return null_argument("config");
  return make_table(out, [&] { return tiltprop::two_ray_comparison(config->config); });
}

tp_status tp_limits_check(const tp_config* config, tp_table** out) {
  if (!config) return null_argument("config");
  return make_table(out, [&] { return tiltprop::limits_check(config->config); });
}

size_t tp_table_rows(const tp_table* table) { return table ? table->table.rows.size() : 0; }

size_t tp_table_columns(const tp_table* table) {
  return table ? table->table.columns.size() : 0;
}

const char* tp_table_column_name(const tp_table* table, size_t column) {
  if (!table || column >= table->table.columns.size()) return nullptr;
  return table->table.columns[column].c_str();
}

double tp_table_value(const tp_table* table, size_t row, size_t column) {
  if (!table || row >= table->table.rows.size() ||
      column >= table->table.rows[row].size())
    return std::nan("");
  return table->table.rows[row][column];
}

tp_status tp_table_csv(const tp_table* table, char** out) {
  if (!table) return null_argument("table");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = copy_string(table->table.to_csv()); });
}

void tp_table_free(tp_table* table) { delete table; }

}  // extern "C"
