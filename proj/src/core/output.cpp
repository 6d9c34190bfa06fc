#include "core/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace tiltprop {

namespace {

std::string number(double v, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace

std::string metrics_csv(const MarchState& state, const RunMetrics& metrics) {
  std::string out = "n,x,energy,max_intensity\n";
  for (std::size_t n = 0; n < metrics.energy_per_step.size(); ++n) {
    out += std::to_string(n) + "," + number(state.grid.x_at(n)) + "," +
           number(metrics.energy_per_step[n]) + "," + number(metrics.max_per_step[n]) +
           "\n";
  }
  return out;
}

std::string summary_csv(const MarchState& state, const RunMetrics& m) {
  const GridSpec& g = state.grid;
  std::string out = "name,value\n";
  auto row = [&](const char* name, double v) { out += std::string(name) + "," + number(v) + "\n"; };
  row("n_x", static_cast<double>(g.n_x));
  row("n_y", static_cast<double>(g.n_y));
  row("dx", g.delta_x);
  row("dy", g.delta_y);
  row("rays", static_cast<double>(state.beams.size()));
  row("beam_center", m.beam_center);
  row("max_energy", m.max_energy);
  row("max_step", static_cast<double>(m.max_step));
  row("max_x", m.max_x);
  row("max_y", m.max_y);
  row("focusing_distance", m.focusing_distance);
  row("total_energy", m.total_energy);
  row("entrance_energy", m.energy_per_step.empty() ? 0.0 : m.energy_per_step.front());
  row("exit_energy", m.energy_per_step.empty() ? 0.0 : m.energy_per_step.back());
  row("absorbed", state.absorbed);
  row("layer_loss", state.layer_loss);
  row("spectral_excess", state.spectral_excess);
  return out;
}

std::string intensity_csv(const MarchState& state) {
  const std::size_t ny = state.grid.n_y;
  std::string out = "# " + std::to_string(state.snapshot_steps.size()) + " " +
                    std::to_string(ny) + " " +
                    number(state.grid.delta_x * static_cast<double>(state.snapshot_stride)) +
                    " " + number(state.grid.delta_y) + "\n";
  char buf[32];
  for (std::size_t k = 0; k < state.snapshot_steps.size(); ++k) {
    const auto row = state.snapshot(k);
    for (std::size_t j = 0; j < ny; ++j) {
      // Nine digits reproduce a float exactly.
      const int len = std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(row[j]));
      if (j) out += ',';
      out.append(buf, static_cast<std::size_t>(len));
    }
    out += '\n';
  }
  return out;
}

std::string intensity_pgm(const MarchState& state) {
  const std::size_t width = state.snapshot_steps.size();
  const std::size_t height = state.grid.n_y;
  const float top = state.snapshots.empty()
                        ? 0.0f
                        : *std::max_element(state.snapshots.begin(), state.snapshots.end());
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + width * height, '\0');
  if (!(top > 0.0f)) return out;
  for (std::size_t k = 0; k < width; ++k) {
    const auto row = state.snapshot(k);
    for (std::size_t j = 0; j < height; ++j) {
      const double level = std::round(255.0 * static_cast<double>(row[j]) / top);
      const std::size_t r = height - 1 - j;
      out[header + r * width + k] =
          static_cast<char>(static_cast<unsigned char>(std::clamp(level, 0.0, 255.0)));
    }
  }
  return out;
}

void emit_outputs(const MarchState& state, const RunMetrics& metrics,
                  const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(out_dir, "cannot create directory: " + ec.message());
  write_file(dir / "metrics.csv", metrics_csv(state, metrics));
  write_file(dir / "summary.csv", summary_csv(state, metrics));
  write_file(dir / "intensity.csv", intensity_csv(state));
  write_file(dir / "intensity.pgm", intensity_pgm(state));
}

IntensityGrid parse_intensity_csv(const std::string& text) {
  IntensityGrid grid;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw IoError("intensity.csv", "missing '# rows n_y dx dy' header");
  {
    std::istringstream h(line.substr(2));
    if (!(h >> grid.rows >> grid.n_y >> grid.row_spacing >> grid.delta_y))
      throw IoError("intensity.csv", "malformed header");
  }
  grid.values.reserve(grid.rows * grid.n_y);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      float v = 0.0f;
      const auto [next, err] = std::from_chars(p, end, v);
      if (err != std::errc()) throw IoError("intensity.csv", "malformed value");
      grid.values.push_back(v);
      p = next;
      if (p < end && *p == ',') ++p;
    }
  }
  if (grid.values.size() != grid.rows * grid.n_y)
    throw IoError("intensity.csv", "value count does not match the header");
  return grid;
}

IntensityGrid read_intensity_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_intensity_csv(ss.str());
  } catch (const IoError& e) {
    throw IoError(path, std::string(e.what()).substr(e.path().size() + 2));
  }
}

}  // namespace tiltprop
