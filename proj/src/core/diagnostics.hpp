#pragma once

// Figures of merit of a completed march and comparisons between runs.

#include <cstddef>
#include <vector>

#include "core/marching.hpp"

namespace tiltprop {

struct RunMetrics {
  std::vector<double> energy_per_step;   // E^n over the whole line
  std::vector<double> max_per_step;      // max_j |u^n_j|^2 over interior cells
  double max_energy = 0.0;               // max_{n,j} over interior cells
  std::size_t max_step = 0;
  std::size_t max_j = 0;
  double max_x = 0.0;
  double max_y = 0.0;
  double focusing_distance = 0.0;        // from (0, y_c) to (max_x, max_y)
  double total_energy = 0.0;             // sum_n sum_j |u|^2 dx dy, interior cells
  double beam_center = 0.0;              // y_c
};

/// Metrics of a march. The maximum is taken over interior cells; ties go to
/// the smallest n, then the smallest j. The ray origin is the amplitude
/// weighted centre of the first beam on x = 0.
RunMetrics beam_metrics(const MarchState& state);

struct ComparisonReport {
  double energy_error = 0.0;
  double focusing_error = 0.0;
  double max_energy_error = 0.0;
};

/// l1 error of |u|^2 over the coarse interior nodes, normalized by the
/// reference sum on the same nodes, plus the relative errors on the focusing
/// distance and on the maximum. The reference steps must be power-of-two
/// refinements of the coarse ones with coincident nodes, and every needed
/// reference station must have been stored; throws std::invalid_argument
/// otherwise.
ComparisonReport compare_to_reference(const MarchState& coarse,
                                      const MarchState& reference);

/// Same figures for grids that do not nest: the reference intensity is
/// interpolated bilinearly at the coarse nodes.
ComparisonReport compare_interpolated(const MarchState& coarse,
                                      const MarchState& reference);

/// True when the reference nodes contain every coarse node.
bool grids_nest(const MarchState& coarse, const MarchState& reference);

/// compare_to_reference when the grids nest, compare_interpolated otherwise.
ComparisonReport compare_runs(const MarchState& coarse, const MarchState& reference);

/// Foci along x: local maxima of max_per_step above `level` times the
/// global maximum, merged unless the profile between two of them dips by at
/// least `dip` (relative to the smaller peak).
std::vector<std::size_t> find_foci(const std::vector<double>& max_per_step,
                                   double level = 0.5, double dip = 0.1);

/// The beam focuses when its maximum exceeds the entrance maximum by `gain`.
bool focuses(const RunMetrics& metrics, double gain = 1.1);

}  // namespace tiltprop
