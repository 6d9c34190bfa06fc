#pragma once

#include <vector>

#include "core/marching.hpp"

namespace fixtures {

// A march state holding a given intensity on every station, row-major (n, j).
inline tiltprop::MarchState synthetic(double dx, double dy, std::size_t n_x, std::size_t n_y,
                                      const std::vector<float>& intensity,
                                      double center = 0.0) {
  tiltprop::MarchState s;
  s.grid.delta_x = dx;
  s.grid.delta_y = dy;
  s.grid.n_x = n_x;
  s.grid.n_y = n_y;
  s.grid.layer_width = 2;
  tiltprop::BeamSpec b;
  b.speckles = {{1.0, center, 1.0, 0.0}};
  s.beams = {b};
  s.step = n_x;
  s.snapshot_stride = 1;
  s.snapshots = intensity;
  for (std::size_t n = 0; n <= n_x; ++n) {
    s.snapshot_steps.push_back(n);
    tiltprop::StationRecord r;
    for (std::size_t j = 0; j < n_y; ++j) {
      const double v = intensity[n * n_y + j];
      r.energy += v * dy;
      if (!s.grid.is_interior(j)) continue;
      r.interior_energy += v * dy;
      if (v > r.max_intensity) {
        r.max_intensity = v;
        r.argmax_j = j;
      }
    }
    s.stations.push_back(r);
  }
  return s;
}

}  // namespace fixtures
