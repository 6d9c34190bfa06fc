#pragma once

// Second half of each marching step: upwind advection along y with the
// variable absorption nu1, refraction mu, absorbing edge layers B and an
// optional source, all treated implicitly:
//
//   k_x/dx (u^{n+1} - u#) + k_y/dy (F_j - F_{j-1})
//     + (nu1 + i mu) (u#_theta + u^{n+1}) / 2 + B u^{n+1} = S.
//
// Ghost values outside the line are zero.

#include <cstddef>
#include <span>
#include <vector>

#include "core/model.hpp"

namespace tiltprop {

struct StepCoefficients {
  double theta = 1.0;
  std::vector<double> nu1;
  std::vector<double> mu;
  std::vector<double> absorbing;
  std::vector<Complex> source;  // empty: no source
};

/// Geometric damping profile on the outermost `layer_width + 1` cells of
/// each edge: b * beta^(w - j) near j = 0, mirrored near j = n_y - 1.
std::vector<double> absorbing_profile(const AbsorbingLayerSpec& layer,
                                      std::size_t n_y, std::size_t layer_width);

/// u#_theta = theta u_{j-1} + (1 - theta) u_j, the value on the
/// characteristic through (x^{n+1}, y_j).
Complex characteristic_value(std::span<const Complex> line, std::ptrdiff_t j,
                             double theta);

/// All characteristic values of a line for a beam travelling towards +y
/// (`upwind_below` true) or -y.
std::vector<Complex> characteristic_line(std::span<const Complex> line,
                                         double theta, bool upwind_below);

double limiter_phi(LimiterKind kind, double lambda);

/// Ratio of consecutive energy differences
/// (|u_j|^2 - |u_{j-1}|^2) / (|u_{j+1}|^2 - |u_j|^2). A 0/0 ratio is 1; a
/// zero denominator alone saturates at +-1e12.
double gradient_ratio(std::span<const Complex> line, std::ptrdiff_t j);

/// F_j = u_j + (1 - theta)/2 (u_{j+1} - u_j) phi(lambda_j).
Complex limited_flux(std::span<const Complex> line, std::ptrdiff_t j,
                     double theta, LimiterKind kind);

/// f(w) = exp(-alpha w^2) - 1.
double nonlinear_mu(double w, double alpha);
/// Same as nonlinear_mu with w^2 given directly.
double nonlinear_mu_sq(double w_squared, double alpha);

/// Energy bookkeeping of one transport step.
struct TransportTally {
  double layer_loss = 0.0;  // sum over cells of |u without B|^2 - |u|^2
};

/// Advances one line through the transport stage. A beam with k_y < 0 is
/// handled by reflecting the line and coefficients, stepping with |k_y|, and
/// reflecting back. Throws NumericalError if theta > 1.
FieldLine transport_step(const FieldLine& line, const StepCoefficients& coeffs,
                         const GridSpec& grid, const BeamSpec& beam, int order,
                         LimiterKind kind, TransportTally* tally = nullptr);

}  // namespace tiltprop
