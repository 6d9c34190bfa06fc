#include "core/marching.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/line_transform.hpp"
#include "core/spectral.hpp"
#include "core/transport.hpp"

namespace tiltprop {

namespace {

constexpr double kBlowUpIntensity = 1e12;

// Refraction seen by the driver: either a scaled field or the nonlinear law.
struct RefractionModel {
  bool nonlinear = false;
  double alpha = 0.0;
  GridField field;
  double scale = 1.0;
};

struct Source {
  const ComplexPlane* plane = nullptr;
  double scale = 0.0;
};

struct Ray {
  BeamSpec beam;
  double theta;
  SpectralPropagator propagator;
  LineTransform transform;
};

void check_field(const GridField& f, const GridSpec& grid, const char* what) {
  if (!f.fits(grid))
    throw std::invalid_argument(std::string(what) + " does not match the grid");
}

void record_station(MarchState& s, std::size_t n, const MarchOptions& options) {
  const GridSpec& g = s.grid;
  std::vector<double> intensity(g.n_y, 0.0);
  for (std::size_t p = 0; p < s.lines.size(); ++p) {
    const auto& line = s.lines[p];
    double e = 0.0;
    for (std::size_t j = 0; j < g.n_y; ++j) {
      const double v = std::norm(line.values[j]);
      intensity[j] += v;
      e += v;
    }
    s.ray_energy[p].push_back(e * g.delta_y);
    if (options.observer) options.observer(p, line);
    if (options.keep_fields) {
      auto row = s.fields[p].row(n);
      std::copy(line.values.begin(), line.values.end(), row.begin());
    }
  }

  StationRecord rec;
  for (std::size_t j = 0; j < g.n_y; ++j) {
    rec.energy += intensity[j];
    if (!g.is_interior(j)) continue;
    rec.interior_energy += intensity[j];
    if (intensity[j] > rec.max_intensity) {
      rec.max_intensity = intensity[j];
      rec.argmax_j = j;
    }
  }
  rec.energy *= g.delta_y;
  rec.interior_energy *= g.delta_y;
  s.stations.push_back(rec);

  if (options.keep_snapshots && n % s.snapshot_stride == 0) {
    s.snapshot_steps.push_back(n);
    for (double v : intensity) s.snapshots.push_back(static_cast<float>(v));
  }
}

void check_blow_up(const FieldLine& line, std::size_t step) {
  for (const auto& v : line.values) {
    const double e = std::norm(v);
    if (!std::isfinite(e) || e > kBlowUpIntensity)
      throw NumericalError(step, "field blew up (|u|^2 > 1e12 or non-finite)");
  }
}

MarchState run_march(const RunConfig& config, const std::vector<BeamSpec>& beams,
                     double nu0, const GridField& nu1,
                     const RefractionModel& refraction, const Source& source,
                     const MarchOptions& options) {
  const GridSpec& grid = config.grid;
  grid.validate();
  check_field(nu1, grid, "nu1");
  if (!refraction.nonlinear) check_field(refraction.field, grid, "mu");
  if (source.plane && (source.plane->stations != grid.stations() ||
                       source.plane->n_y != grid.n_y))
    throw std::invalid_argument("source field does not match the grid");
  if (beams.empty() || beams.size() > 2)
    throw std::invalid_argument("march: expected one or two beams");

  const SpectralGrid sgrid = SpectralGrid::for_grid(grid);
  const std::size_t ny = grid.n_y;

  MarchState s;
  s.grid = grid;
  s.beams = beams;
  s.snapshot_stride = std::max<std::size_t>(1, config.snapshot_stride);
  s.ray_energy.resize(beams.size());
  s.stations.reserve(grid.stations());
  if (options.keep_fields)
    s.fields.assign(beams.size(), ComplexPlane(grid.stations(), ny));

  std::vector<Ray> rays;
  rays.reserve(beams.size());
  for (std::size_t p = 0; p < beams.size(); ++p) {
    const BeamSpec& b = beams[p];
    double theta = cfl_number(grid, b);
    if (std::abs(theta - 1.0) <= 1e-12) theta = 1.0;
    if (theta > 1.0) throw NumericalError(0, "CFL number exceeds 1");
    rays.push_back(Ray{b, theta, SpectralPropagator(sgrid, b, nu0, grid.delta_x),
                       LineTransform(ny)});
    const FieldLine g = boundary_data_g(b, grid, config.g_mode);
    FieldLine u0 = init_boundary_field(g, nu0, b, sgrid);
    u0.x_index = 0;
    s.initial.push_back(u0);
    s.lines.push_back(std::move(u0));
  }
  record_station(s, 0, options);

  const std::vector<double> absorbing =
      absorbing_profile(config.layer, ny, grid.layer_width);
  StepCoefficients coeffs;
  coeffs.absorbing = absorbing;
  coeffs.nu1.resize(ny);
  coeffs.mu.resize(ny);
  std::vector<std::vector<Complex>> characteristic(rays.size());
  const double cell = grid.delta_x * grid.delta_y;

  for (std::size_t n = 0; n < grid.n_x; ++n) {
    for (std::size_t p = 0; p < rays.size(); ++p) {
      const double before = line_energy(s.lines[p].span(), grid.delta_y);
      rays[p].propagator.apply(s.lines[p].span(), rays[p].transform);
      const double after = line_energy(s.lines[p].span(), grid.delta_y);
      s.spectral_excess += rays[p].beam.k_x * (before - after) -
                           2.0 * nu0 * grid.delta_x * before;
    }

    for (std::size_t j = 0; j < ny; ++j) coeffs.nu1[j] = nu1.at(n, j);
    if (refraction.nonlinear) {
      for (std::size_t p = 0; p < rays.size(); ++p)
        characteristic[p] = characteristic_line(s.lines[p].span(), rays[p].theta,
                                                rays[p].beam.k_y >= 0.0);
      for (std::size_t j = 0; j < ny; ++j) {
        double w2 = 0.0;
        for (const auto& ch : characteristic) w2 += std::norm(ch[j]);
        coeffs.mu[j] = nonlinear_mu_sq(w2, refraction.alpha);
      }
    } else {
      for (std::size_t j = 0; j < ny; ++j)
        coeffs.mu[j] = refraction.scale * refraction.field.at(n, j);
    }
    if (source.plane) {
      const auto row = source.plane->row(n + 1);
      coeffs.source.resize(ny);
      for (std::size_t j = 0; j < ny; ++j) coeffs.source[j] = source.scale * row[j];
    }

    for (std::size_t p = 0; p < rays.size(); ++p) {
      Ray& ray = rays[p];
      coeffs.theta = ray.theta;
      TransportTally tally;
      FieldLine next = transport_step(s.lines[p], coeffs, grid, ray.beam,
                                      config.scheme_order, config.limiter, &tally);
      next.x_index = n + 1;
      check_blow_up(next, n + 1);
      s.layer_loss += ray.beam.k_x * grid.delta_y * tally.layer_loss;
      double absorbed = 0.0;
      for (std::size_t j = 0; j < ny; ++j)
        absorbed += 2.0 * (nu0 + nu1.at(n + 1, j)) * std::norm(next.values[j]);
      s.absorbed += absorbed * cell;
      s.lines[p] = std::move(next);
    }
    s.step = n + 1;
    record_station(s, n + 1, options);
  }
  return s;
}

RefractionModel refraction_of(const MediumSpec& medium) {
  RefractionModel r;
  if (medium.is_nonlinear()) {
    r.nonlinear = true;
    r.alpha = medium.alpha();
  } else {
    r.field = std::get<PrescribedRefraction>(medium.refraction).mu;
  }
  return r;
}

}  // namespace

std::size_t MarchState::snapshot_index(std::size_t n) const {
  if (n % snapshot_stride != 0) return npos;
  const std::size_t k = n / snapshot_stride;
  return k < snapshot_steps.size() ? k : npos;
}

MarchState march_one_ray(const RunConfig& config, const MarchOptions& options) {
  if (config.beams.empty()) throw ConfigError("beam.angle_deg", "no beam configured");
  return run_march(config, {config.beam()}, config.medium.nu0, config.medium.nu1,
                   refraction_of(config.medium), Source{}, options);
}

MarchState march_two_ray(const RunConfig& config, const MarchOptions& options) {
  if (config.beams.size() != 2)
    throw ConfigError("beam2.angle_deg", "two-ray run needs a second beam");
  return run_march(config, config.beams, config.medium.nu0, config.medium.nu1,
                   refraction_of(config.medium), Source{}, options);
}

MarchState march(const RunConfig& config, const MarchOptions& options) {
  return config.beams.size() == 2 ? march_two_ray(config, options)
                                  : march_one_ray(config, options);
}

double TimeEnvelopeParams::root() const { return std::sqrt(1.0 - n_mean); }

double TimeEnvelopeParams::absorption() const {
  const double r = root();
  return 1.0 / (c * r * delta_t) + nu_diamond / (2.0 * r);
}

void TimeEnvelopeParams::validate() const {
  if (!(n_mean >= 0.0 && n_mean < 1.0))
    throw ConfigError("n_mean", "mean density must lie in [0, 1)");
  if (!(delta_t > 0.0)) throw ConfigError("delta_t", "must be > 0");
  if (!(c > 0.0)) throw ConfigError("c", "must be > 0");
  if (!(nu_diamond >= 0.0)) throw ConfigError("nu_diamond", "must be >= 0");
}

MarchState time_envelope_step(const ComplexPlane& u_ini,
                              const TimeEnvelopeParams& params,
                              const RunConfig& config,
                              const MarchOptions& options) {
  params.validate();
  if (config.beams.empty()) throw ConfigError("beam.angle_deg", "no beam configured");
  RefractionModel refraction;
  refraction.field = params.delta_n;
  refraction.scale = params.k0 / (2.0 * params.root());
  Source source;
  if (!u_ini.values.empty()) {
    source.plane = &u_ini;
    source.scale = 1.0 / (params.c * params.root() * params.delta_t);
  }
  return run_march(config, {config.beam()}, params.absorption(), GridField(0.0),
                   refraction, source, options);
}

EnergyBalance energy_balance_report(const MarchState& state, const RunConfig&) {
  EnergyBalance b;
  b.absorbed = state.absorbed;
  b.layer_loss = state.layer_loss;
  b.spectral_excess = state.spectral_excess;
  const SpectralGrid sgrid = SpectralGrid::for_grid(state.grid);
  const double dy = state.grid.delta_y;
  for (std::size_t p = 0; p < state.beams.size(); ++p) {
    const BeamSpec& beam = state.beams[p];
    b.boundary += beam.k_x * line_energy(state.initial[p].span(), dy);
    b.outgoing += beam.k_x * state.ray_energy[p].back();

    // D u_in = k_y (k_x d/dy - k_y d/dx) u_in = (k_y / k_x) d/dy u_in for a
    // profile that depends on k_x y - k_y x only.
    const FieldLine u_in = sample_incident_profile(beam, state.grid, 0.0);
    const FieldLine du = spectral_derivative(u_in, sgrid);
    double sum = 0.0;
    for (std::size_t j = 0; j < u_in.size(); ++j) {
      const Complex v = beam.epsilon * beam.k_y / beam.k_x * du.values[j] -
                        Complex(0.0, 2.0 * beam.k_x) * u_in.values[j];
      sum += std::norm(v);
    }
    b.prop1_bound += sum * dy / beam.k_x;
  }
  b.prop1_holds = b.absorbed + b.boundary <= b.prop1_bound * (1.0 + 1e-12);
  if (b.boundary > 0.0) {
    const double open = b.boundary - b.absorbed - b.layer_loss - b.outgoing;
    b.residual = open / b.boundary;
    b.closed_residual = (open - b.spectral_excess) / b.boundary;
  }
  return b;
}

}  // namespace tiltprop
