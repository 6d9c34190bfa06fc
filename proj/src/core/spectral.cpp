#include "core/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "core/errors.hpp"

namespace tiltprop {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_finite(const FieldLine& line, const char* where) {
  if (!all_finite(line.span()))
    throw std::invalid_argument(std::string(where) + ": non-finite input values");
}

void require_length(const FieldLine& line, const SpectralGrid& sgrid,
                    const char* where) {
  if (line.size() != sgrid.size())
    throw std::invalid_argument(std::string(where) + ": line length mismatch");
}

}  // namespace

SpectralGrid SpectralGrid::for_grid(const GridSpec& grid) {
  SpectralGrid s;
  s.delta_y = grid.delta_y;
  const std::size_t n = grid.n_y;
  s.frequencies.resize(n);
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid.delta_y);
  for (std::size_t m = 0; m < n; ++m) {
    // Bins above n/2 hold the negative frequencies; the Nyquist bin is +n/2.
    const auto signed_m = m <= n / 2 ? static_cast<double>(m)
                                     : static_cast<double>(m) - static_cast<double>(n);
    s.frequencies[m] = base * signed_m;
  }
  return s;
}

Complex principal_sqrt(Complex z) {
  // Pin a signed zero imaginary part to +0 so negative reals map to +i.
  if (z.imag() == 0.0) z = Complex(z.real(), 0.0);
  return std::sqrt(z);
}

Complex root_argument(double eta, double nu, const BeamSpec& beam) {
  const double kx2 = beam.k_x * beam.k_x;
  return Complex(1.0 - 2.0 * beam.epsilon * beam.k_y * eta / kx2,
                 2.0 * nu * beam.epsilon * beam.k_y * beam.k_y / kx2);
}

Complex r_minus(double eta, double nu0, const BeamSpec& beam) {
  if (beam.k_y == 0.0)
    throw std::domain_error("r_minus: k_y = 0, use propagation_exponent");
  const Complex s = principal_sqrt(root_argument(eta, nu0, beam));
  return kI * (beam.k_x * eta / beam.k_y) -
         kI * (beam.k_x / (beam.epsilon * beam.k_y * beam.k_y)) * (1.0 - s);
}

Complex propagation_exponent(double eta, double nu0, const BeamSpec& beam) {
  const Complex s = principal_sqrt(root_argument(eta, nu0, beam));
  const Complex one_plus = 1.0 + s;
  const double kx3 = beam.k_x * beam.k_x * beam.k_x;
  return -2.0 * nu0 / (beam.k_x * one_plus) -
         2.0 * kI * eta * beam.epsilon * (eta - kI * nu0 * beam.k_y) /
             (kx3 * one_plus * one_plus);
}

SpectralPropagator::SpectralPropagator(const SpectralGrid& sgrid,
                                       const BeamSpec& beam, double nu0,
                                       double delta_x) {
  multipliers_.reserve(sgrid.size());
  for (double eta : sgrid.frequencies)
    multipliers_.push_back(std::exp(propagation_exponent(eta, nu0, beam) * delta_x));
}

void SpectralPropagator::apply(std::span<Complex> line,
                               LineTransform& transform) const {
  transform.forward(line);
  for (std::size_t m = 0; m < line.size(); ++m) line[m] *= multipliers_[m];
  transform.inverse(line);
}

FieldLine spectral_stage_apply(const FieldLine& line, double delta_x,
                               double nu0, const BeamSpec& beam,
                               const SpectralGrid& sgrid) {
  require_length(line, sgrid, "spectral_stage_apply");
  require_finite(line, "spectral_stage_apply");
  const SpectralPropagator prop(sgrid, beam, nu0, delta_x);
  LineTransform transform(sgrid.size());
  FieldLine out = line;
  prop.apply(out.span(), transform);
  return out;
}

FieldLine boundary_data_g(const BeamSpec& beam, const GridSpec& grid,
                          BoundaryGMode mode) {
  if (mode == BoundaryGMode::Simplified)
    return sample_incident_profile(beam, grid, 0.0);

  // (k_x d/dy - k_y d/dx) h(Y) = h'(Y) for Y = k_x (y - y_k) - k_y x, and
  // h'(Y) = -2 Y / L_s^2 h(Y) for a Gaussian speckle.
  FieldLine g(grid.n_y);
  for (std::size_t j = 0; j < grid.n_y; ++j) {
    const double y = grid.y_at(j);
    Complex sum{0.0, 0.0};
    for (const auto& s : beam.speckles) {
      const double transverse = beam.k_x * (y - s.center);
      const double q = transverse / s.width;
      const Complex value = s.amplitude * std::exp(-q * q) * std::polar(1.0, s.phase);
      const Complex correction =
          1.0 - kI * beam.epsilon * beam.k_y * transverse /
                    (beam.k_x * s.width * s.width);
      sum += value * correction;
    }
    g.values[j] = sum;
  }
  return g;
}

FieldLine init_boundary_field(const FieldLine& g, double nu_in,
                              const BeamSpec& beam, const SpectralGrid& sgrid) {
  return analytic_halfspace_solution(g, 0.0, nu_in, beam, sgrid);
}

FieldLine analytic_halfspace_solution(const FieldLine& g, double x, double nu,
                                      const BeamSpec& beam,
                                      const SpectralGrid& sgrid) {
  require_length(g, sgrid, "analytic_halfspace_solution");
  require_finite(g, "analytic_halfspace_solution");
  LineTransform transform(sgrid.size());
  FieldLine u = g;
  transform.forward(u.span());
  for (std::size_t m = 0; m < sgrid.size(); ++m) {
    const double eta = sgrid.frequencies[m];
    const Complex s = principal_sqrt(root_argument(eta, nu, beam));
    Complex factor = 2.0 / (1.0 + s);
    if (x != 0.0) {
      // R_minus written through the finite exponent so k_y = 0 is allowed.
      const Complex r = propagation_exponent(eta, nu, beam) -
                        kI * (eta * beam.k_y / beam.k_x);
      factor *= std::exp(r * x);
    }
    u.values[m] *= factor;
  }
  transform.inverse(u.span());
  return u;
}

FieldLine spectral_derivative(const FieldLine& line, const SpectralGrid& sgrid) {
  require_length(line, sgrid, "spectral_derivative");
  LineTransform transform(sgrid.size());
  FieldLine d = line;
  transform.forward(d.span());
  const std::size_t n = sgrid.size();
  for (std::size_t m = 0; m < n; ++m) {
    // The Nyquist mode has no odd counterpart; its derivative is dropped.
    const double eta = (n % 2 == 0 && m == n / 2) ? 0.0 : sgrid.frequencies[m];
    d.values[m] *= kI * eta;
  }
  transform.inverse(d.span());
  return d;
}

}  // namespace tiltprop
