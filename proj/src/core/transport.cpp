#include "core/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"

namespace tiltprop {

namespace {

constexpr double kSaturatedRatio = 1e12;
constexpr double kThetaTolerance = 1e-12;

Complex at(std::span<const Complex> line, std::ptrdiff_t j) {
  if (j < 0 || j >= static_cast<std::ptrdiff_t>(line.size())) return {0.0, 0.0};
  return line[static_cast<std::size_t>(j)];
}

double ratio_from_energies(double lower, double mid, double upper) {
  const double num = mid - lower;
  const double den = upper - mid;
  if (den == 0.0) {
    if (num == 0.0) return 1.0;
    return num > 0.0 ? kSaturatedRatio : -kSaturatedRatio;
  }
  return num / den;
}

template <class T>
std::vector<T> reversed(const std::vector<T>& v) {
  return std::vector<T>(v.rbegin(), v.rend());
}

// Core update for a beam travelling towards +y.
void step_upward(std::span<const Complex> in, const StepCoefficients& c,
                 double rate, int order, LimiterKind kind,
                 std::span<Complex> out, TransportTally* tally) {
  const std::size_t n = in.size();
  const double theta = c.theta;
  const bool has_source = !c.source.empty();

  // Flux corrections C_j = (1 - theta)/2 (u_{j+1} - u_j) phi(lambda_j) for
  // j = -1..n-1, stored at index j + 1.
  std::vector<Complex> correction;
  if (order == 2 && theta < 1.0) {
    std::vector<double> energy(n + 3, 0.0);  // index k + 2 holds |u_k|^2
    for (std::size_t j = 0; j < n; ++j) energy[j + 2] = std::norm(in[j]);
    correction.assign(n + 1, Complex{0.0, 0.0});
    const double half_gap = 0.5 * (1.0 - theta);
    for (std::ptrdiff_t j = -1; j < static_cast<std::ptrdiff_t>(n); ++j) {
      const auto k = static_cast<std::size_t>(j + 2);
      const double lambda = ratio_from_energies(energy[k - 1], energy[k], energy[k + 1]);
      const double phi = limiter_phi(kind, lambda);
      if (phi != 0.0)
        correction[k - 1] = half_gap * (at(in, j + 1) - at(in, j)) * phi;
    }
  }

  double layer_loss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto sj = static_cast<std::ptrdiff_t>(j);
    const Complex u_theta = characteristic_value(in, sj, theta);
    Complex advected = rate * u_theta;
    if (!correction.empty())
      advected = rate * (u_theta - theta * (correction[j + 1] - correction[j]));
    const Complex reaction(c.nu1[j], c.mu[j]);
    Complex numerator = advected - 0.5 * reaction * u_theta;
    if (has_source) numerator += c.source[j];
    const Complex open_denominator = rate + 0.5 * reaction;
    const Complex value = numerator / (open_denominator + c.absorbing[j]);
    out[j] = value;
    if (tally && c.absorbing[j] != 0.0)
      layer_loss += std::norm(numerator / open_denominator) - std::norm(value);
  }
  if (tally) tally->layer_loss += layer_loss;
}

}  // namespace

std::vector<double> absorbing_profile(const AbsorbingLayerSpec& layer,
                                      std::size_t n_y, std::size_t layer_width) {
  if (n_y <= 2 * layer_width)
    throw std::invalid_argument("absorbing_profile: n_y must exceed 2*layer_width");
  std::vector<double> b(n_y, 0.0);
  const auto w = static_cast<double>(layer_width);
  const std::size_t j_max = n_y - 1;
  for (std::size_t j = 0; j < n_y; ++j) {
    if (j <= layer_width)
      b[j] = layer.b * std::pow(layer.beta, w - static_cast<double>(j));
    else if (j_max - j <= layer_width)
      b[j] = layer.b * std::pow(layer.beta, w - static_cast<double>(j_max - j));
  }
  return b;
}

Complex characteristic_value(std::span<const Complex> line, std::ptrdiff_t j,
                             double theta) {
  return theta * at(line, j - 1) + (1.0 - theta) * at(line, j);
}

std::vector<Complex> characteristic_line(std::span<const Complex> line,
                                         double theta, bool upwind_below) {
  const std::size_t n = line.size();
  std::vector<Complex> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto sj = static_cast<std::ptrdiff_t>(j);
    const Complex upwind = upwind_below ? at(line, sj - 1) : at(line, sj + 1);
    out[j] = theta * upwind + (1.0 - theta) * line[j];
  }
  return out;
}

double limiter_phi(LimiterKind kind, double lambda) {
  if (!(lambda > 0.0)) return 0.0;
  switch (kind) {
    case LimiterKind::VanLeer:
      return (std::abs(lambda) + lambda) / (1.0 + std::abs(lambda));
    case LimiterKind::Clamped:
      return std::min(lambda, 1.0);
    case LimiterKind::Superbee:
      return std::max({0.0, std::min(2.0 * lambda, 1.0), std::min(lambda, 2.0)});
  }
  return 0.0;
}

double gradient_ratio(std::span<const Complex> line, std::ptrdiff_t j) {
  return ratio_from_energies(std::norm(at(line, j - 1)), std::norm(at(line, j)),
                             std::norm(at(line, j + 1)));
}

Complex limited_flux(std::span<const Complex> line, std::ptrdiff_t j,
                     double theta, LimiterKind kind) {
  const Complex u = at(line, j);
  const double phi = limiter_phi(kind, gradient_ratio(line, j));
  return u + 0.5 * (1.0 - theta) * (at(line, j + 1) - u) * phi;
}

double nonlinear_mu(double w, double alpha) {
  return nonlinear_mu_sq(w * w, alpha);
}

double nonlinear_mu_sq(double w_squared, double alpha) {
  return std::expm1(-alpha * w_squared);
}

FieldLine transport_step(const FieldLine& line, const StepCoefficients& coeffs,
                         const GridSpec& grid, const BeamSpec& beam, int order,
                         LimiterKind kind, TransportTally* tally) {
  const std::size_t n = line.size();
  if (coeffs.theta > 1.0 + kThetaTolerance)
    throw NumericalError(line.x_index, "CFL number exceeds 1; transport stage is unstable");
  if (coeffs.theta < 0.0)
    throw std::invalid_argument("transport_step: negative CFL number");
  if (coeffs.nu1.size() != n || coeffs.mu.size() != n || coeffs.absorbing.size() != n ||
      (!coeffs.source.empty() && coeffs.source.size() != n))
    throw std::invalid_argument("transport_step: coefficient length mismatch");
  if (order != 1 && order != 2)
    throw std::invalid_argument("transport_step: order must be 1 or 2");

  const double rate = beam.k_x / grid.delta_x;
  FieldLine out(n, line.x_index + 1);
  StepCoefficients c = coeffs;
  c.theta = std::min(coeffs.theta, 1.0);

  if (beam.k_y >= 0.0) {
    step_upward(line.span(), c, rate, order, kind, out.span(), tally);
    return out;
  }

  // Downward beam: reflect, step upward, reflect back.
  const auto flipped = reversed(line.values);
  c.nu1 = reversed(c.nu1);
  c.mu = reversed(c.mu);
  c.absorbing = reversed(c.absorbing);
  if (!c.source.empty()) c.source = reversed(c.source);
  std::vector<Complex> tmp(n);
  step_upward(flipped, c, rate, order, kind, tmp, tally);
  std::reverse_copy(tmp.begin(), tmp.end(), out.values.begin());
  return out;
}

}  // namespace tiltprop
