#pragma once

// Run artefacts: per-step metrics, run summary and the |u|^2 snapshots as
// text and as an 8-bit image.

#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/marching.hpp"

namespace tiltprop {

/// Writes metrics.csv, summary.csv, intensity.csv and intensity.pgm into
/// `out_dir`, creating it if needed. Throws IoError naming the failing path.
void emit_outputs(const MarchState& state, const RunMetrics& metrics,
                  const std::string& out_dir);

std::string metrics_csv(const MarchState& state, const RunMetrics& metrics);
std::string summary_csv(const MarchState& state, const RunMetrics& metrics);

/// Snapshot rows, one line per stored station, after a
/// `# rows n_y row_spacing delta_y` header.
std::string intensity_csv(const MarchState& state);

/// Binary PGM (P5): one column per stored station, one row per node with y
/// increasing upwards, grey level linear in |u|^2 from 0 to the maximum.
std::string intensity_pgm(const MarchState& state);

struct IntensityGrid {
  std::size_t rows = 0;
  std::size_t n_y = 0;
  double row_spacing = 0.0;
  double delta_y = 0.0;
  std::vector<float> values;
};

IntensityGrid parse_intensity_csv(const std::string& text);
IntensityGrid read_intensity_csv(const std::string& path);

}  // namespace tiltprop
