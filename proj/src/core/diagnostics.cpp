#include "core/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace tiltprop {

namespace {

// Integer power-of-two ratio fine/coarse step, or 0 if there is none.
std::size_t refinement_ratio(double coarse, double fine) {
  const double r = coarse / fine;
  const double rounded = std::round(r);
  if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * rounded) return 0;
  const auto k = static_cast<std::size_t>(rounded);
  return std::has_single_bit(k) ? k : 0;
}

double relative(double value, double reference) {
  if (reference == 0.0) return value == 0.0 ? 0.0 : std::abs(value);
  return std::abs(value - reference) / std::abs(reference);
}

ComparisonReport finish(const MarchState& coarse, const MarchState& reference,
                        double diff, double norm) {
  const RunMetrics mc = beam_metrics(coarse);
  const RunMetrics mr = beam_metrics(reference);
  ComparisonReport r;
  r.energy_error = norm > 0.0 ? diff / norm : (diff > 0.0 ? diff : 0.0);
  r.focusing_error = relative(mc.focusing_distance, mr.focusing_distance);
  r.max_energy_error = relative(mc.max_energy, mr.max_energy);
  return r;
}

// Sums |I_c - I_r| and I_r over the coarse interior nodes of every stored
// coarse station; `sample(n, j)` gives the reference intensity there.
std::pair<double, double> accumulate(
    const MarchState& coarse,
    const std::function<double(std::size_t, std::size_t)>& sample) {
  double diff = 0.0, norm = 0.0;
  const GridSpec& g = coarse.grid;
  for (std::size_t k = 0; k < coarse.snapshot_steps.size(); ++k) {
    const std::size_t n = coarse.snapshot_steps[k];
    const auto row = coarse.snapshot(k);
    for (std::size_t j = 0; j < g.n_y; ++j) {
      if (!g.is_interior(j)) continue;
      const double ref = sample(n, j);
      diff += std::abs(static_cast<double>(row[j]) - ref);
      norm += ref;
    }
  }
  return {diff, norm};
}

}  // namespace

RunMetrics beam_metrics(const MarchState& state) {
  RunMetrics m;
  const GridSpec& g = state.grid;
  m.beam_center = state.beams.empty() ? 0.0 : state.beams.front().center();
  m.energy_per_step.reserve(state.stations.size());
  m.max_per_step.reserve(state.stations.size());
  bool found = false;
  for (std::size_t n = 0; n < state.stations.size(); ++n) {
    const StationRecord& r = state.stations[n];
    m.energy_per_step.push_back(r.energy);
    m.max_per_step.push_back(r.max_intensity);
    m.total_energy += r.interior_energy * g.delta_x;
    if (!found || r.max_intensity > m.max_energy) {
      found = true;
      m.max_energy = r.max_intensity;
      m.max_step = n;
      m.max_j = r.argmax_j;
    }
  }
  m.max_x = g.x_at(m.max_step);
  m.max_y = g.y_at(m.max_j);
  m.focusing_distance = std::hypot(m.max_x, m.max_y - m.beam_center);
  return m;
}

bool grids_nest(const MarchState& coarse, const MarchState& reference) {
  const GridSpec& c = coarse.grid;
  const GridSpec& f = reference.grid;
  const std::size_t rx = refinement_ratio(c.delta_x, f.delta_x);
  const std::size_t ry = refinement_ratio(c.delta_y, f.delta_y);
  if (rx == 0 || ry == 0) return false;
  if (std::abs(c.y_origin - f.y_origin) > 1e-9 * f.delta_y) return false;
  if ((c.n_y - 1) * ry >= f.n_y) return false;
  for (std::size_t n : coarse.snapshot_steps)
    if (n * rx > f.n_x || reference.snapshot_index(n * rx) == MarchState::npos)
      return false;
  return true;
}

ComparisonReport compare_to_reference(const MarchState& coarse,
                                      const MarchState& reference) {
  if (!grids_nest(coarse, reference))
    throw std::invalid_argument(
        "compare_to_reference: reference grid is not a nested power-of-two "
        "refinement of the coarse grid");
  const std::size_t rx = refinement_ratio(coarse.grid.delta_x, reference.grid.delta_x);
  const std::size_t ry = refinement_ratio(coarse.grid.delta_y, reference.grid.delta_y);
  const auto [diff, norm] = accumulate(coarse, [&](std::size_t n, std::size_t j) {
    const auto row = reference.snapshot(reference.snapshot_index(n * rx));
    return static_cast<double>(row[j * ry]);
  });
  return finish(coarse, reference, diff, norm);
}

ComparisonReport compare_interpolated(const MarchState& coarse,
                                      const MarchState& reference) {
  if (reference.snapshot_steps.empty())
    throw std::invalid_argument("compare_interpolated: reference has no snapshots");
  const GridSpec& c = coarse.grid;
  const GridSpec& f = reference.grid;
  const double stride_x = f.delta_x * static_cast<double>(reference.snapshot_stride);
  const double last_row = static_cast<double>(reference.snapshot_steps.size() - 1);
  const double last_col = static_cast<double>(f.n_y - 1);

  const auto [diff, norm] = accumulate(coarse, [&](std::size_t n, std::size_t j) {
    const double s = std::clamp(c.x_at(n) / stride_x, 0.0, last_row);
    const double t = std::clamp((c.y_at(j) - f.y_origin) / f.delta_y, 0.0, last_col);
    const auto k0 = static_cast<std::size_t>(std::floor(s));
    const auto j0 = static_cast<std::size_t>(std::floor(t));
    const std::size_t k1 = std::min(k0 + 1, reference.snapshot_steps.size() - 1);
    const std::size_t j1 = std::min<std::size_t>(j0 + 1, f.n_y - 1);
    const double a = s - static_cast<double>(k0);
    const double b = t - static_cast<double>(j0);
    const auto r0 = reference.snapshot(k0);
    const auto r1 = reference.snapshot(k1);
    const double lo = (1.0 - b) * r0[j0] + b * r0[j1];
    const double hi = (1.0 - b) * r1[j0] + b * r1[j1];
    return (1.0 - a) * lo + a * hi;
  });
  return finish(coarse, reference, diff, norm);
}

ComparisonReport compare_runs(const MarchState& coarse, const MarchState& reference) {
  return grids_nest(coarse, reference) ? compare_to_reference(coarse, reference)
                                       : compare_interpolated(coarse, reference);
}

std::vector<std::size_t> find_foci(const std::vector<double>& profile, double level,
                                   double dip) {
  std::vector<std::size_t> foci;
  if (profile.empty()) return foci;
  const double top = *std::max_element(profile.begin(), profile.end());
  if (!(top > 0.0)) return foci;
  const double floor = level * top;
  const std::size_t n = profile.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = profile[i];
    if (v < floor) continue;
    const bool left_ok = i == 0 || v > profile[i - 1];
    const bool right_ok = i + 1 == n || v >= profile[i + 1];
    if (!left_ok || !right_ok) continue;
    if (!foci.empty()) {
      const std::size_t prev = foci.back();
      const double valley =
          *std::min_element(profile.begin() + static_cast<std::ptrdiff_t>(prev),
                            profile.begin() + static_cast<std::ptrdiff_t>(i));
      const double smaller = std::min(profile[prev], v);
      if (valley > (1.0 - dip) * smaller) {
        // Same focus: keep the higher peak.
        if (v > profile[prev]) foci.back() = i;
        continue;
      }
    }
    foci.push_back(i);
  }
  return foci;
}

bool focuses(const RunMetrics& metrics, double gain) {
  if (metrics.max_per_step.empty()) return false;
  return metrics.max_energy > gain * metrics.max_per_step.front();
}

}  // namespace tiltprop
