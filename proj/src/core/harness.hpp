#pragma once

// Parameter sweeps built on the marching solver. Each sweep derives its runs
// from the document of a base configuration and reports one table row per
// run.

#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/marching.hpp"

namespace tiltprop {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
  /// Column index by name; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  double at(std::size_t row, const std::string& name) const {
    return rows.at(row).at(column(name));
  }
};

/// Configuration derived from `base` with the given keys replaced.
RunConfig derive_config(const RunConfig& base, const KeyValueDoc& overrides);
std::string format_number(double v);

/// Marches a configuration with every station stored.
MarchState run_full(const RunConfig& config);

/// Runs at delta_x = delta_y = h for each mesh and compares with the run at
/// `reference_mesh`. Columns: mesh, energy_error, focusing_distance,
/// focusing_error, max_energy, max_energy_error.
Table convergence_harness(const RunConfig& base, const std::vector<double>& meshes,
                          double reference_mesh);

/// Runs with delta_y fixed and delta_x = cfl delta_y k_x / |k_y|, compared with
/// the first-order run at delta_x = delta_y = reference_mesh. Columns: cfl, dx,
/// energy_error, focusing_distance, focusing_error, max_energy,
/// max_energy_error.
Table cfl_sweep(const RunConfig& base, const std::vector<double>& cfls, int order,
                LimiterKind limiter, double delta_y, double reference_mesh);

/// Every (b, beta) pair at delta_x = delta_y = mesh, compared with
/// (b, beta) = (0.1, 50). Columns: b, beta, energy_error, max_energy_error.
Table layer_sweep(const RunConfig& base, const std::vector<double>& bs,
                  const std::vector<double>& betas, double mesh);

/// Splits a total absorption nu into nu0 = r nu and nu1 = (1 - r) nu for each
/// ratio r, compared with r = 0.5. Columns: ratio, energy_error,
/// focusing_distance, focusing_error, max_energy, max_energy_error.
Table nu_split_sweep(const RunConfig& base, double nu_total,
                     const std::vector<double>& ratios);

struct AngleCase {
  double angle_deg;
  double delta_x;
  double delta_y;
};

/// Runs each incidence angle on its own mesh and compares the focusing
/// distance and maximum with the reference values. A listed pair whose CFL
/// number exceeds one keeps delta_x and widens delta_y to delta_x |k_y| / k_x.
/// Columns: angle, dx, dy, cfl, max_energy, max_energy_error,
/// focusing_distance, focusing_error.
Table angle_sweep(const RunConfig& base, const std::vector<AngleCase>& cases,
                  double reference_focus, double reference_max);

/// Interacting two-ray run against the superposition of the two beams run
/// alone. Columns: interacting_max, superposed_max, gain.
Table two_ray_comparison(const RunConfig& config);

/// Classical split-step solution of i u_x + (eps/2) u_yy + i nu u - mu u = 0
/// with u(0, y) = u_in, using the same implicit reaction and absorbing layers
/// as the transport stage. Returns every station.
ComplexPlane schrodinger_reference(const RunConfig& config);

/// Consistency checks in the limits k_y -> 0, eps -> 0 and alpha -> 0.
/// Columns: check, value, tolerance, pass. Check ids: 1 k_y -> 0 against the
/// classical scheme (max relative l2 difference), 2 linear decay of
/// g - u_in with eps (ratio error), 3 two-ray at alpha = 0 against the
/// superposition (max relative l2 difference).
Table limits_check(const RunConfig& config);

}  // namespace tiltprop
