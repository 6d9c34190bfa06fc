#pragma once

// Exact constant-coefficient machinery for the diffraction part of the
// tilted paraxial equation
//
//   i k.grad u + (eps/2) Lap_perp u + i nu u = 0,   x > 0,
//
// after a Fourier transform in y. Each transverse mode evolves as
// exp(R_minus(i eta) x); the marching scheme removes the advection part
// i eta k_y / k_x and leaves it to the transport stage.

#include <span>
#include <vector>

#include "core/line_transform.hpp"
#include "core/model.hpp"

namespace tiltprop {

/// Angular frequencies of the discrete transform in bin order,
/// eta_m = 2 pi m / (n_y delta_y) for m in (-n_y/2, n_y/2].
struct SpectralGrid {
  std::vector<double> frequencies;
  double delta_y = 1.0;

  static SpectralGrid for_grid(const GridSpec& grid);

  std::size_t size() const { return frequencies.size(); }
  /// Weight w such that sum |u_hat_m|^2 w = sum |u_j|^2 delta_y.
  double transform_weight() const {
    return delta_y / static_cast<double>(frequencies.size());
  }
};

/// Square root with non-negative real part. A negative real argument with a
/// zero imaginary part maps to +i sqrt|z| (the limit from Im z > 0).
Complex principal_sqrt(Complex z);

/// 1 - 2 eps k_y eta / k_x^2 + 2 i nu eps k_y^2 / k_x^2.
Complex root_argument(double eta, double nu, const BeamSpec& beam);

/// Decaying root R_minus(i eta). Requires k_y != 0; throws std::domain_error
/// otherwise (use propagation_exponent, which has the removable singularity
/// written out).
Complex r_minus(double eta, double nu0, const BeamSpec& beam);

/// R_minus(i eta) + i eta k_y / k_x in the form that stays finite at k_y = 0.
Complex propagation_exponent(double eta, double nu0, const BeamSpec& beam);

/// Per-bin multipliers exp(propagation_exponent(eta_m) * delta_x), built once
/// and applied at every marching step.
class SpectralPropagator {
 public:
  SpectralPropagator(const SpectralGrid& sgrid, const BeamSpec& beam,
                     double nu0, double delta_x);

  std::span<const Complex> multipliers() const { return multipliers_; }

  /// In-place forward transform, bin-wise product, inverse transform.
  void apply(std::span<Complex> line, LineTransform& transform) const;

 private:
  std::vector<Complex> multipliers_;
};

/// One diffraction step over delta_x with the constant absorption nu0.
FieldLine spectral_stage_apply(const FieldLine& line, double delta_x,
                               double nu0, const BeamSpec& beam,
                               const SpectralGrid& sgrid);

/// Entrance data g of the half-space problem, sampled on the grid.
/// Analytic mode applies the exact transverse derivative of each Gaussian
/// speckle; Simplified mode returns u_in.
FieldLine boundary_data_g(const BeamSpec& beam, const GridSpec& grid,
                          BoundaryGMode mode = BoundaryGMode::Analytic);

/// Field on x = 0: F(u0) = 2 F(g) / (1 + sqrt(root_argument(eta, nu_in))).
FieldLine init_boundary_field(const FieldLine& g, double nu_in,
                              const BeamSpec& beam, const SpectralGrid& sgrid);

/// Exact half-space solution at station x for constant absorption nu and no
/// refraction. Periodic in y, like every spectral operation here.
FieldLine analytic_halfspace_solution(const FieldLine& g, double x, double nu,
                                      const BeamSpec& beam,
                                      const SpectralGrid& sgrid);

/// d/dy of a line, evaluated spectrally.
FieldLine spectral_derivative(const FieldLine& line, const SpectralGrid& sgrid);

}  // namespace tiltprop
