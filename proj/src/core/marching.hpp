#pragma once

// Space-marching driver. Each step of size delta_x applies the spectral
// diffraction stage with nu0 and then the transport stage with nu1, the
// refraction and the absorbing layers (plain Lie splitting).

#include <cstddef>
#include <functional>
#include <vector>

#include "core/model.hpp"

namespace tiltprop {

/// Complex field over all stations, row-major (station, j).
struct ComplexPlane {
  std::size_t stations = 0;
  std::size_t n_y = 0;
  std::vector<Complex> values;

  ComplexPlane() = default;
  ComplexPlane(std::size_t stations, std::size_t n_y)
      : stations(stations), n_y(n_y), values(stations * n_y) {}

  std::span<const Complex> row(std::size_t n) const {
    return std::span<const Complex>(values).subspan(n * n_y, n_y);
  }
  std::span<Complex> row(std::size_t n) {
    return std::span<Complex>(values).subspan(n * n_y, n_y);
  }
};

/// Summary of the combined intensity I_j = sum_p |u^p_j|^2 on one station.
struct StationRecord {
  double energy = 0.0;           // sum_j I_j delta_y over the whole line
  double interior_energy = 0.0;  // same, absorbing layers excluded
  double max_intensity = 0.0;    // over interior cells
  std::size_t argmax_j = 0;
};

struct MarchState {
  GridSpec grid;
  std::vector<BeamSpec> beams;
  std::size_t step = 0;

  std::vector<FieldLine> initial;  // u^0 per ray
  std::vector<FieldLine> lines;    // current line per ray
  std::vector<StationRecord> stations;
  std::vector<std::vector<double>> ray_energy;  // E^n per ray

  /// |u|^2 (summed over rays) in single precision on every station that is a
  /// multiple of snapshot_stride, row-major (snapshot, j).
  std::size_t snapshot_stride = 1;
  std::vector<std::size_t> snapshot_steps;
  std::vector<float> snapshots;

  /// Full complex fields per ray, filled only when requested.
  std::vector<ComplexPlane> fields;

  double absorbed = 0.0;    // sum_n>=1 sum_j 2 nu |u|^2 dx dy
  double layer_loss = 0.0;  // flux removed by the absorbing layers
  /// Flux removed by the spectral stage beyond its nu0 share, mostly
  /// evanescent modes of sharply truncated profiles.
  double spectral_excess = 0.0;

  std::span<const float> snapshot(std::size_t k) const {
    return std::span<const float>(snapshots).subspan(k * grid.n_y, grid.n_y);
  }
  /// Snapshot index of station n, or npos when it was not stored.
  std::size_t snapshot_index(std::size_t n) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct MarchOptions {
  /// Called with (ray, line) on every station, including x = 0.
  std::function<void(std::size_t, const FieldLine&)> observer;
  bool keep_fields = false;
  bool keep_snapshots = true;
};

MarchState march_one_ray(const RunConfig& config, const MarchOptions& options = {});

/// Both beams advance in lockstep and share mu_j = f(w_j) with
/// w_j^2 = |u^1_theta,j|^2 + |u^2_theta,j|^2. Each ray uses its own
/// direction in both stages.
MarchState march_two_ray(const RunConfig& config, const MarchOptions& options = {});

/// Marches every beam of the configuration: one ray or two.
MarchState march(const RunConfig& config, const MarchOptions& options = {});

struct TimeEnvelopeParams {
  double c = 299.792458;  // um/ps
  double n_mean = 0.0;    // N_m
  double delta_t = 1.0;   // ps
  double k0 = 1.0;        // rad/um
  double nu_diamond = 0.0;
  GridField delta_n;

  double root() const;  // sqrt(1 - N_m)
  /// 1/(c sqrt(1-N_m) dt) + nu_diamond / (2 sqrt(1-N_m)).
  double absorption() const;
  void validate() const;
};

/// One implicit time step of the envelope equation: a stationary march with
/// absorption and refraction derived from `params` and the source
/// u_ini / (c sqrt(1-N_m) dt) injected in the transport stage. `u_ini` may be
/// empty (zero source).
MarchState time_envelope_step(const ComplexPlane& u_ini,
                              const TimeEnvelopeParams& params,
                              const RunConfig& config,
                              const MarchOptions& options = {});

struct EnergyBalance {
  double absorbed = 0.0;
  double boundary = 0.0;        // sum_p k_x sum |u^0|^2 dy
  double prop1_bound = 0.0;     // sum_p (1/k_x) sum |eps D u_in - 2i k_x u_in|^2 dy
  bool prop1_holds = false;
  double layer_loss = 0.0;
  double outgoing = 0.0;        // sum_p k_x E^N
  double spectral_excess = 0.0;
  double residual = 0.0;        // (boundary - absorbed - layers - outgoing) / boundary
  double closed_residual = 0.0; // same with the spectral excess also removed
};

EnergyBalance energy_balance_report(const MarchState& state, const RunConfig& config);

}  // namespace tiltprop
