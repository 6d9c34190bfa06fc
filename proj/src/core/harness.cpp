#include "core/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/line_transform.hpp"
#include "core/spectral.hpp"
#include "core/transport.hpp"

namespace tiltprop {

namespace {

double relative_l2(std::span<const Complex> a, std::span<const Complex> b) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    diff += std::norm(a[j] - b[j]);
    norm += std::norm(b[j]);
  }
  if (norm == 0.0) return std::sqrt(diff);
  return std::sqrt(diff / norm);
}

double max_relative_l2(const ComplexPlane& a, const ComplexPlane& b) {
  if (a.stations != b.stations || a.n_y != b.n_y)
    throw std::invalid_argument("field planes differ in shape");
  double worst = 0.0;
  for (std::size_t n = 0; n < a.stations; ++n)
    worst = std::max(worst, relative_l2(a.row(n), b.row(n)));
  return worst;
}

std::vector<double> comparison_row(std::initializer_list<double> lead,
                                   const RunMetrics& m, const ComparisonReport& r) {
  std::vector<double> row(lead);
  row.insert(row.end(), {r.energy_error, m.focusing_distance, r.focusing_error,
                         m.max_energy, r.max_energy_error});
  return row;
}

const std::vector<std::string> kComparisonColumns = {
    "energy_error", "focusing_distance", "focusing_error", "max_energy",
    "max_energy_error"};

std::vector<std::string> with_lead(std::initializer_list<std::string> lead) {
  std::vector<std::string> cols(lead);
  cols.insert(cols.end(), kComparisonColumns.begin(), kComparisonColumns.end());
  return cols;
}

KeyValueDoc mesh_overrides(double dx, double dy) {
  return {{"grid.dx", format_number(dx)}, {"grid.dy", format_number(dy)}};
}

// Direction keys replaced by an explicit angle.
KeyValueDoc angle_overrides(double angle_deg) {
  return {{"beam.angle_deg", format_number(angle_deg)}, {"beam.kx", ""}, {"beam.ky", ""}};
}

RunConfig single_beam(const RunConfig& config, std::size_t p) {
  RunConfig c = config;
  c.beams = {config.beams.at(p)};
  return c;
}

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i)
    out += (i ? "," : "") + columns[i];
  out += '\n';
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.10g", row[i]);
      out += (i ? "," : "");
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig derive_config(const RunConfig& base, const KeyValueDoc& overrides) {
  return config_from_document(with_overrides(base.document, overrides));
}

MarchState run_full(const RunConfig& config) {
  RunConfig c = config;
  c.snapshot_stride = 1;
  return march(c);
}

Table convergence_harness(const RunConfig& base, const std::vector<double>& meshes,
                          double reference_mesh) {
  const MarchState ref =
      run_full(derive_config(base, mesh_overrides(reference_mesh, reference_mesh)));
  Table t{with_lead({"mesh"}), {}};
  for (double h : meshes) {
    const MarchState s = run_full(derive_config(base, mesh_overrides(h, h)));
    t.rows.push_back(comparison_row({h}, beam_metrics(s), compare_to_reference(s, ref)));
  }
  return t;
}

Table cfl_sweep(const RunConfig& base, const std::vector<double>& cfls, int order,
                LimiterKind limiter, double delta_y, double reference_mesh) {
  KeyValueDoc ref_doc = mesh_overrides(reference_mesh, reference_mesh);
  ref_doc["scheme.order"] = "1";
  const MarchState ref = run_full(derive_config(base, ref_doc));
  const BeamSpec& beam = base.beam();
  if (beam.k_y == 0.0) throw std::invalid_argument("cfl_sweep: k_y = 0 has no CFL number");

  Table t{with_lead({"cfl", "dx"}), {}};
  for (double cfl : cfls) {
    const double dx = cfl * delta_y * beam.k_x / std::abs(beam.k_y);
    KeyValueDoc o = mesh_overrides(dx, delta_y);
    o["scheme.order"] = std::to_string(order);
    o["scheme.limiter"] = std::string(to_string(limiter));
    const MarchState s = run_full(derive_config(base, o));
    t.rows.push_back(comparison_row({cfl, dx}, beam_metrics(s), compare_runs(s, ref)));
  }
  return t;
}

Table layer_sweep(const RunConfig& base, const std::vector<double>& bs,
                  const std::vector<double>& betas, double mesh) {
  KeyValueDoc ref_doc = mesh_overrides(mesh, mesh);
  ref_doc["layer.b"] = "0.1";
  ref_doc["layer.beta"] = "50";
  const MarchState ref = run_full(derive_config(base, ref_doc));
  Table t{{"b", "beta", "energy_error", "max_energy_error"}, {}};
  for (double b : bs) {
    for (double beta : betas) {
      KeyValueDoc o = ref_doc;
      o["layer.b"] = format_number(b);
      o["layer.beta"] = format_number(beta);
      const MarchState s = run_full(derive_config(base, o));
      const ComparisonReport r = compare_to_reference(s, ref);
      t.rows.push_back({b, beta, r.energy_error, r.max_energy_error});
    }
  }
  return t;
}

Table nu_split_sweep(const RunConfig& base, double nu_total,
                     const std::vector<double>& ratios) {
  auto split = [&](double r) {
    return KeyValueDoc{{"medium.nu0", format_number(r * nu_total)},
                       {"medium.nu1", format_number((1.0 - r) * nu_total)}};
  };
  const MarchState ref = run_full(derive_config(base, split(0.5)));
  Table t{with_lead({"ratio"}), {}};
  for (double r : ratios) {
    const MarchState s = run_full(derive_config(base, split(r)));
    t.rows.push_back(comparison_row({r}, beam_metrics(s), compare_to_reference(s, ref)));
  }
  return t;
}

Table angle_sweep(const RunConfig& base, const std::vector<AngleCase>& cases,
                  double reference_focus, double reference_max) {
  Table t{{"angle", "dx", "dy", "cfl", "max_energy", "max_energy_error",
           "focusing_distance", "focusing_error"},
          {}};
  for (const AngleCase& a : cases) {
    const BeamSpec beam = BeamSpec::from_angle(a.angle_deg, 1.0);
    double dy = a.delta_y;
    if (beam.k_y != 0.0 && std::abs(beam.k_y) / beam.k_x * a.delta_x / dy > 1.0)
      dy = a.delta_x * std::abs(beam.k_y) / beam.k_x;
    KeyValueDoc o = angle_overrides(a.angle_deg);
    o.merge(mesh_overrides(a.delta_x, dy));
    const RunConfig c = derive_config(base, o);
    MarchOptions opts;
    opts.keep_snapshots = false;
    const RunMetrics m = beam_metrics(march(c, opts));
    t.rows.push_back({a.angle_deg, a.delta_x, dy, c.theta(), m.max_energy,
                      std::abs(m.max_energy - reference_max) / reference_max,
                      m.focusing_distance,
                      std::abs(m.focusing_distance - reference_focus) / reference_focus});
  }
  return t;
}

Table two_ray_comparison(const RunConfig& config) {
  if (config.beams.size() != 2)
    throw ConfigError("beam2.angle_deg", "two-ray comparison needs a second beam");
  const MarchState both = run_full(config);
  const MarchState one = run_full(single_beam(config, 0));
  const MarchState two = run_full(single_beam(config, 1));
  double superposed = 0.0;
  for (std::size_t k = 0; k < one.snapshot_steps.size(); ++k) {
    const auto a = one.snapshot(k);
    const auto b = two.snapshot(k);
    for (std::size_t j = 0; j < config.grid.n_y; ++j)
      if (config.grid.is_interior(j))
        superposed = std::max(superposed, static_cast<double>(a[j]) + b[j]);
  }
  const double interacting = beam_metrics(both).max_energy;
  return Table{{"interacting_max", "superposed_max", "gain"},
               {{interacting, superposed, interacting / superposed}}};
}

ComplexPlane schrodinger_reference(const RunConfig& config) {
  const GridSpec& grid = config.grid;
  const BeamSpec& beam = config.beam();
  const std::size_t ny = grid.n_y;
  const double dx = grid.delta_x;
  const double nu0 = config.medium.nu0;
  const SpectralGrid sgrid = SpectralGrid::for_grid(grid);
  std::vector<Complex> diffraction(ny);
  for (std::size_t m = 0; m < ny; ++m) {
    const double eta = sgrid.frequencies[m];
    diffraction[m] = std::exp(Complex(-nu0, -0.5 * beam.epsilon * eta * eta) * dx);
  }
  const std::vector<double> layer = absorbing_profile(config.layer, ny, grid.layer_width);
  const bool nonlinear = config.medium.is_nonlinear();
  const double alpha = nonlinear ? config.medium.alpha() : 0.0;
  const GridField mu_field =
      nonlinear ? GridField(0.0) : std::get<PrescribedRefraction>(config.medium.refraction).mu;

  ComplexPlane out(grid.stations(), ny);
  FieldLine u = sample_incident_profile(beam, grid, 0.0);
  std::copy(u.values.begin(), u.values.end(), out.row(0).begin());
  LineTransform transform(ny);
  for (std::size_t n = 0; n < grid.n_x; ++n) {
    transform.forward(u.span());
    for (std::size_t m = 0; m < ny; ++m) u.values[m] *= diffraction[m];
    transform.inverse(u.span());
    for (std::size_t j = 0; j < ny; ++j) {
      const double mu = nonlinear ? std::expm1(-alpha * std::norm(u.values[j]))
                                  : mu_field.at(n, j);
      const Complex half = 0.5 * dx * Complex(config.medium.nu1.at(n, j), mu);
      u.values[j] *= (1.0 - half) / (1.0 + half + dx * layer[j]);
    }
    std::copy(u.values.begin(), u.values.end(), out.row(n + 1).begin());
  }
  return out;
}

Table limits_check(const RunConfig& config) {
  Table t{{"check", "value", "tolerance", "pass"}, {}};
  auto add = [&](double id, double value, double tol) {
    t.rows.push_back({id, value, tol, value <= tol ? 1.0 : 0.0});
  };
  const KeyValueDoc no_second = {{"beam2.angle_deg", ""}, {"beam2.kx", ""},
                                 {"beam2.ky", ""}, {"beam2.speckles", ""}};

  // 1. Nearly normal incidence against the classical scheme.
  {
    KeyValueDoc o = no_second;
    o["beam.angle_deg"] = "";
    o["beam.kx"] = "1";
    o["beam.ky"] = "1e-12";
    const RunConfig tilted = derive_config(config, o);
    RunConfig normal = tilted;
    normal.beams.front().k_y = 0.0;
    MarchOptions opts;
    opts.keep_fields = true;
    opts.keep_snapshots = false;
    const MarchState s = march_one_ray(tilted, opts);
    add(1, max_relative_l2(s.fields.front(), schrodinger_reference(normal)), 1e-8);
  }

  // 2. g - u_in is linear in eps.
  {
    BeamSpec beam = config.beam();
    std::vector<double> gaps;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      beam.epsilon = eps;
      const FieldLine g = boundary_data_g(beam, config.grid, BoundaryGMode::Analytic);
      const FieldLine u = sample_incident_profile(beam, config.grid, 0.0);
      double d = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) d += std::norm(g.values[j] - u.values[j]);
      gaps.push_back(std::sqrt(d));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
      worst = std::max(worst, std::abs(gaps[i] / (10.0 * gaps[i + 1]) - 1.0));
    add(2, worst, 1e-9);
  }

  // 3. Uncoupled rays superpose.
  {
    KeyValueDoc o{{"medium.mode", "nonlinear"}, {"medium.alpha", "0"}};
    if (config.beams.size() < 2) {
      o["beam2.angle_deg"] =
          format_number(-std::atan2(config.beam().k_y, config.beam().k_x) * 180.0 /
                        std::numbers::pi);
    }
    const RunConfig c = derive_config(config, o);
    MarchOptions opts;
    opts.keep_fields = true;
    opts.keep_snapshots = false;
    const MarchState both = march_two_ray(c, opts);
    double worst = 0.0;
    for (std::size_t p = 0; p < 2; ++p) {
      const MarchState alone = march_one_ray(single_beam(c, p), opts);
      worst = std::max(worst, max_relative_l2(both.fields[p], alone.fields.front()));
    }
    add(3, worst, 1e-10);
  }
  return t;
}

}  // namespace tiltprop
