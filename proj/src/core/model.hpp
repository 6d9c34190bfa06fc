#pragma once

// Domain types shared by every stage of the solver: grid geometry, beam and
// medium descriptions, run configuration, and the incident beam profile.
//
// All lengths are in micrometres.

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tiltprop {

using Complex = std::complex<double>;

/// Rectangular marching grid. Stations are x_n = n * delta_x for
/// n = 0..n_x, nodes are y_j = y_origin + j * delta_y for j = 0..n_y-1.
struct GridSpec {
  double delta_x = 0.0;
  double delta_y = 0.0;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  double y_origin = 0.0;
  std::size_t layer_width = 5;

  double length_x() const { return static_cast<double>(n_x) * delta_x; }
  double length_y() const { return static_cast<double>(n_y) * delta_y; }
  double x_at(std::size_t n) const { return static_cast<double>(n) * delta_x; }
  double y_at(std::size_t j) const {
    return y_origin + static_cast<double>(j) * delta_y;
  }
  std::size_t stations() const { return n_x + 1; }

  /// True when j lies outside the absorbing layers and the one-cell margin
  /// next to them.
  bool is_interior(std::size_t j) const {
    return j > layer_width && j + layer_width + 1 < n_y;
  }

  void validate() const;
};

/// One Gaussian hot spot of the incident profile.
struct Speckle {
  double amplitude = 1.0;
  double center = 0.0;  // y_k
  double width = 2.5;   // L_s
  double phase = 0.0;   // zeta_k, radians
};

struct BeamSpec {
  double k_x = 1.0;
  double k_y = 0.0;
  double epsilon = 0.05;
  std::vector<Speckle> speckles;

  static BeamSpec from_angle(double angle_deg, double epsilon,
                             std::vector<Speckle> speckles = {});

  /// Amplitude-weighted mean of the speckle centres.
  double center() const;
  void validate() const;
};

/// Real coefficient over the grid stations, either constant or sampled at
/// every (n, j) for n = 0..n_x.
class GridField {
 public:
  GridField(double value = 0.0) : constant_(value) {}  // NOLINT(implicit)
  GridField(std::size_t stations, std::size_t n_y, std::vector<double> values);

  double at(std::size_t n, std::size_t j) const {
    return values_.empty() ? constant_ : values_[n * n_y_ + j];
  }
  bool is_constant() const { return values_.empty(); }
  double constant() const { return constant_; }
  double infimum() const;
  double supremum() const;
  GridField offset_by(double delta) const;
  /// Checks that a sampled field matches the grid it is used with.
  bool fits(const GridSpec& grid) const;

 private:
  double constant_ = 0.0;
  std::size_t n_y_ = 0;
  std::vector<double> values_;
};

struct PrescribedRefraction {
  GridField mu;
};

struct NonlinearRefraction {
  double alpha = 0.0;
};

using Refraction = std::variant<PrescribedRefraction, NonlinearRefraction>;

/// Absorption split nu = nu0 + nu1; nu0 is handled exactly in the spectral
/// stage, nu1 in the transport stage.
struct MediumSpec {
  double nu0 = 0.0;
  GridField nu1;
  Refraction refraction = PrescribedRefraction{};

  bool is_nonlinear() const {
    return std::holds_alternative<NonlinearRefraction>(refraction);
  }
  double alpha() const;
  void validate() const;
};

/// Splits a total absorption field into its infimum and the remainder.
MediumSpec split_absorption(const GridField& total, Refraction refraction);

struct AbsorbingLayerSpec {
  double b = 0.1;
  double beta = 50.0;

  void validate() const;
};

/// One marching slice u^n_j.
struct FieldLine {
  std::vector<Complex> values;
  std::size_t x_index = 0;

  FieldLine() = default;
  explicit FieldLine(std::size_t n, std::size_t x_index = 0)
      : values(n), x_index(x_index) {}
  FieldLine(std::vector<Complex> v, std::size_t x_index = 0)
      : values(std::move(v)), x_index(x_index) {}

  std::size_t size() const { return values.size(); }
  std::span<const Complex> span() const { return values; }
  std::span<Complex> span() { return values; }
};

/// Discrete l2 norm sqrt(sum |u_j|^2 delta_y).
double l2_norm(std::span<const Complex> values, double delta_y);
/// E = sum |u_j|^2 delta_y.
double line_energy(std::span<const Complex> values, double delta_y);
bool all_finite(std::span<const Complex> values);

enum class LimiterKind { VanLeer, Clamped, Superbee };
enum class BoundaryGMode { Analytic, Simplified };

std::string_view to_string(LimiterKind kind);
std::optional<LimiterKind> parse_limiter(std::string_view name);

/// Ordered key -> value map of a configuration document.
using KeyValueDoc = std::map<std::string, std::string>;

struct RunConfig {
  GridSpec grid;
  std::vector<BeamSpec> beams;  // one or two
  MediumSpec medium;
  AbsorbingLayerSpec layer;
  int scheme_order = 1;
  LimiterKind limiter = LimiterKind::VanLeer;
  BoundaryGMode g_mode = BoundaryGMode::Analytic;
  std::size_t snapshot_stride = 1;
  std::string output_dir = "out";

  /// Diagnostics raised while building the configuration (non-fatal).
  std::vector<std::string> warnings;
  /// The document this configuration was parsed from.
  KeyValueDoc document;

  const BeamSpec& beam() const { return beams.front(); }
  /// CFL number of each beam; the scheme uses min(theta, 1) after snapping
  /// values within 1e-12 of one.
  double theta(std::size_t beam_index = 0) const;
};

/// Parses `key = value` lines, `#` comments and blank lines.
KeyValueDoc parse_document(std::string_view text);
std::string format_document(const KeyValueDoc& doc);

RunConfig parse_config(std::string_view text);
RunConfig config_from_document(const KeyValueDoc& doc);
RunConfig load_config(const std::string& path);

/// Writes every resolved value so that parse_config(serialize_config(c))
/// reproduces c. Fields sampled over the grid cannot be serialized.
std::string serialize_config(const RunConfig& config);

/// Copy of `doc` with the given keys replaced (an empty value erases).
KeyValueDoc with_overrides(KeyValueDoc doc, const KeyValueDoc& overrides);

/// |k_y| / k_x * delta_x / delta_y.
double cfl_number(const GridSpec& grid, const BeamSpec& beam);

/// Value of the speckle sum at transverse coordinate (x, y).
Complex incident_value(const BeamSpec& beam, double x, double y);

/// u_in sampled on the grid nodes at station x.
FieldLine sample_incident_profile(const BeamSpec& beam, const GridSpec& grid,
                                  double x);

/// Describes the largest magnitude inside the absorbing layers when it is not
/// below `threshold`; such profiles risk wrap-around through the transform.
std::optional<std::string> edge_leak_warning(const FieldLine& line,
                                             std::size_t layer_width,
                                             double threshold = 1e-14);

}  // namespace tiltprop
