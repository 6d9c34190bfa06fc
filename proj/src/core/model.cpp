#include "core/model.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "core/errors.hpp"

namespace tiltprop {

namespace {

constexpr double kThetaSnap = 1e-12;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
  if (!std::isfinite(value)) throw ConfigError(key, "value must be finite");
  return value;
}

long parse_integer(const std::string& key, std::string_view text) {
  text = trim(text);
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(key, "expected an integer, got '" + std::string(text) + "'");
  return value;
}

// Number of cells covering `length`; exact multiples within round-off are not
// rounded up.
std::size_t cell_count(double length, double delta) {
  const double ratio = length / delta;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio))
    return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(ratio));
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "grid.dx",        "grid.dy",        "grid.lx",         "grid.ly",
      "grid.y0",        "beam.angle_deg", "beam.kx",         "beam.ky",
      "beam.epsilon",   "beam.speckles",  "beam2.angle_deg", "beam2.kx",
      "beam2.ky",       "beam2.speckles", "medium.nu0",      "medium.nu1",
      "medium.mode",    "medium.alpha",   "layer.b",         "layer.beta",
      "layer.width",    "scheme.order",   "scheme.limiter",  "scheme.g_mode",
      "output.dir",     "output.stride"};
  return keys;
}

class DocReader {
 public:
  explicit DocReader(const KeyValueDoc& doc) : doc_(doc) {}

  bool has(const std::string& key) const { return doc_.count(key) != 0; }

  const std::string& text(const std::string& key) const {
    auto it = doc_.find(key);
    if (it == doc_.end()) throw ConfigError(key, "missing required key");
    return it->second;
  }

  double number(const std::string& key) const {
    return parse_number(key, text(key));
  }
  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

 private:
  const KeyValueDoc& doc_;
};

std::vector<Speckle> parse_speckles(const std::string& key,
                                    std::string_view text, double auto_center) {
  std::vector<Speckle> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (item.empty()) continue;

    std::vector<std::string_view> parts;
    std::size_t p = 0;
    while (true) {
      auto c = item.find(':', p);
      parts.push_back(trim(item.substr(p, c == std::string_view::npos
                                              ? std::string_view::npos
                                              : c - p)));
      if (c == std::string_view::npos) break;
      p = c + 1;
    }
    if (parts.size() != 4)
      throw ConfigError(key, "speckle '" + std::string(item) +
                                 "' must be a:y:Ls:zeta");
    Speckle s;
    s.amplitude = parse_number(key, parts[0]);
    s.center = parts[1] == "auto" ? auto_center : parse_number(key, parts[1]);
    s.width = parse_number(key, parts[2]);
    s.phase = parse_number(key, parts[3]);
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError(key, "at least one speckle is required");
  return out;
}

std::string format_speckles(const std::vector<Speckle>& speckles) {
  std::string out;
  for (std::size_t i = 0; i < speckles.size(); ++i) {
    if (i) out += "; ";
    const auto& s = speckles[i];
    out += format_double(s.amplitude) + ":" + format_double(s.center) + ":" +
           format_double(s.width) + ":" + format_double(s.phase);
  }
  return out;
}

// Direction from either an angle or explicit components.
std::pair<double, double> read_direction(const DocReader& r,
                                         const std::string& prefix,
                                         bool required) {
  const std::string angle = prefix + ".angle_deg";
  const std::string kx = prefix + ".kx";
  const std::string ky = prefix + ".ky";
  const bool has_angle = r.has(angle);
  const bool has_components = r.has(kx) || r.has(ky);
  if (has_angle && has_components)
    throw ConfigError(angle, "give either " + angle + " or " + kx + "/" + ky);
  if (has_angle) {
    const double rad = r.number(angle) * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
  }
  if (has_components) return {r.number(kx), r.number(ky)};
  if (required) throw ConfigError(angle, "missing required key");
  return {std::numeric_limits<double>::quiet_NaN(), 0.0};
}

double auto_center(double y0, double span_y, double k_y) {
  return k_y >= 0.0 ? y0 + 0.15 * span_y : y0 + 0.85 * span_y;
}

}  // namespace

// ---------------------------------------------------------------------------

void GridSpec::validate() const {
  if (!(delta_x > 0.0)) throw ConfigError("grid.dx", "must be > 0");
  if (!(delta_y > 0.0)) throw ConfigError("grid.dy", "must be > 0");
  if (n_x < 1) throw ConfigError("grid.lx", "needs at least one cell along x");
  if (n_y < 2 * layer_width + 2)
    throw ConfigError("grid.ly", "needs at least 2*layer_width+2 cells along y");
  if (!std::has_single_bit(n_y))
    throw ConfigError("grid.ly", "cell count along y must be a power of two");
}

BeamSpec BeamSpec::from_angle(double angle_deg, double epsilon,
                              std::vector<Speckle> speckles) {
  const double rad = angle_deg * std::numbers::pi / 180.0;
  BeamSpec b;
  b.k_x = std::cos(rad);
  b.k_y = std::sin(rad);
  b.epsilon = epsilon;
  b.speckles = std::move(speckles);
  return b;
}

double BeamSpec::center() const {
  double wsum = 0.0, ysum = 0.0;
  for (const auto& s : speckles) {
    wsum += std::abs(s.amplitude);
    ysum += std::abs(s.amplitude) * s.center;
  }
  if (wsum == 0.0)
    return speckles.empty() ? 0.0 : speckles.front().center;
  return ysum / wsum;
}

void BeamSpec::validate() const {
  if (std::abs(k_x * k_x + k_y * k_y - 1.0) > 1e-12)
    throw ConfigError("beam.kx", "direction must be a unit vector");
  if (!(k_x > 0.0))
    throw ConfigError("beam.kx", "k_x must be > 0 (beam enters at x = 0)");
  if (!(epsilon > 0.0)) throw ConfigError("beam.epsilon", "must be > 0");
  for (const auto& s : speckles)
    if (!(s.width > 0.0))
      throw ConfigError("beam.speckles", "every speckle width must be > 0");
}

GridField::GridField(std::size_t stations, std::size_t n_y,
                     std::vector<double> values)
    : n_y_(n_y), values_(std::move(values)) {
  if (values_.size() != stations * n_y)
    throw std::invalid_argument("GridField: size does not match stations*n_y");
}

double GridField::infimum() const {
  if (values_.empty()) return constant_;
  return *std::min_element(values_.begin(), values_.end());
}

double GridField::supremum() const {
  if (values_.empty()) return constant_;
  return *std::max_element(values_.begin(), values_.end());
}

GridField GridField::offset_by(double delta) const {
  if (values_.empty()) return GridField(constant_ + delta);
  GridField out = *this;
  for (auto& v : out.values_) v += delta;
  return out;
}

bool GridField::fits(const GridSpec& grid) const {
  return values_.empty() ||
         (n_y_ == grid.n_y && values_.size() == grid.stations() * grid.n_y);
}

double MediumSpec::alpha() const {
  if (const auto* nl = std::get_if<NonlinearRefraction>(&refraction))
    return nl->alpha;
  return 0.0;
}

void MediumSpec::validate() const {
  if (!(nu0 >= 0.0)) throw ConfigError("medium.nu0", "must be >= 0");
  if (!(nu1.infimum() >= 0.0)) throw ConfigError("medium.nu1", "must be >= 0");
  if (const auto* nl = std::get_if<NonlinearRefraction>(&refraction))
    if (!(nl->alpha >= 0.0)) throw ConfigError("medium.alpha", "must be >= 0");
}

MediumSpec split_absorption(const GridField& total, Refraction refraction) {
  MediumSpec m;
  m.nu0 = total.infimum();
  m.nu1 = total.offset_by(-m.nu0);
  m.refraction = std::move(refraction);
  return m;
}

void AbsorbingLayerSpec::validate() const {
  if (!(b >= 0.0)) throw ConfigError("layer.b", "must be >= 0");
  if (!(beta > 1.0)) throw ConfigError("layer.beta", "must be > 1");
}

double l2_norm(std::span<const Complex> values, double delta_y) {
  return std::sqrt(line_energy(values, delta_y));
}

double line_energy(std::span<const Complex> values, double delta_y) {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * delta_y;
}

bool all_finite(std::span<const Complex> values) {
  return std::all_of(values.begin(), values.end(), [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

std::string_view to_string(LimiterKind kind) {
  switch (kind) {
    case LimiterKind::VanLeer: return "vanleer";
    case LimiterKind::Clamped: return "clamped";
    case LimiterKind::Superbee: return "superbee";
  }
  return "vanleer";
}

std::optional<LimiterKind> parse_limiter(std::string_view name) {
  if (name == "vanleer") return LimiterKind::VanLeer;
  if (name == "clamped") return LimiterKind::Clamped;
  if (name == "superbee") return LimiterKind::Superbee;
  return std::nullopt;
}

double RunConfig::theta(std::size_t beam_index) const {
  const double t = cfl_number(grid, beams.at(beam_index));
  return std::abs(t - 1.0) <= kThetaSnap ? 1.0 : t;
}

// ---------------------------------------------------------------------------

KeyValueDoc parse_document(std::string_view text) {
  KeyValueDoc doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("", "line " + std::to_string(line_no) +
                                ": expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (!doc.emplace(key, value).second)
      throw ConfigError(key, "duplicate key on line " + std::to_string(line_no));
  }
  return doc;
}

std::string format_document(const KeyValueDoc& doc) {
  std::string out;
  for (const auto& [k, v] : doc) out += k + " = " + v + "\n";
  return out;
}

KeyValueDoc with_overrides(KeyValueDoc doc, const KeyValueDoc& overrides) {
  for (const auto& [k, v] : overrides) {
    if (v.empty())
      doc.erase(k);
    else
      doc[k] = v;
  }
  return doc;
}

RunConfig parse_config(std::string_view text) {
  return config_from_document(parse_document(text));
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunConfig config_from_document(const KeyValueDoc& doc) {
  for (const auto& [key, value] : doc)
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");

  // Report every missing required key at once.
  {
    std::vector<std::string> missing;
    for (const char* key : {"grid.dx", "grid.dy", "grid.lx", "beam.epsilon",
                            "medium.nu0", "medium.nu1"})
      if (!doc.count(key)) missing.emplace_back(key);
    if (!doc.count("beam.angle_deg") && !doc.count("beam.kx"))
      missing.emplace_back("beam.angle_deg");
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw ConfigError(missing.front(), "missing required keys: " + list);
    }
  }

  const DocReader r(doc);
  RunConfig c;
  c.document = doc;

  // Grid.
  c.grid.delta_x = r.number("grid.dx");
  c.grid.delta_y = r.number("grid.dy");
  if (!(c.grid.delta_x > 0.0)) throw ConfigError("grid.dx", "must be > 0");
  if (!(c.grid.delta_y > 0.0)) throw ConfigError("grid.dy", "must be > 0");
  const double lx = r.number("grid.lx");
  const double ly = r.number_or("grid.ly", lx);
  if (!(lx > 0.0)) throw ConfigError("grid.lx", "must be > 0");
  if (!(ly > 0.0)) throw ConfigError("grid.ly", "must be > 0");
  c.grid.y_origin = r.number_or("grid.y0", 0.0);
  if (r.has("layer.width")) {
    const long w = parse_integer("layer.width", r.text("layer.width"));
    if (w < 0) throw ConfigError("layer.width", "must be >= 0");
    c.grid.layer_width = static_cast<std::size_t>(w);
  }
  c.grid.n_x = std::max<std::size_t>(1, cell_count(lx, c.grid.delta_x));
  c.grid.n_y = std::bit_ceil(std::max<std::size_t>(1, cell_count(ly, c.grid.delta_y)));
  c.grid.validate();

  // Beams.
  const double epsilon = r.number("beam.epsilon");
  for (const std::string prefix : {"beam", "beam2"}) {
    const auto [kx, ky] = read_direction(r, prefix, prefix == "beam");
    if (std::isnan(kx)) {
      if (r.has("beam2.speckles"))
        throw ConfigError("beam2.angle_deg", "beam2.speckles given without a direction");
      continue;
    }
    BeamSpec b;
    b.k_x = kx;
    b.k_y = ky;
    b.epsilon = epsilon;
    const double center = auto_center(c.grid.y_origin, ly, ky);
    const std::string key = prefix + ".speckles";
    b.speckles = r.has(key) ? parse_speckles(key, r.text(key), center)
                            : std::vector<Speckle>{Speckle{1.0, center, 2.5, 0.0}};
    try {
      b.validate();
    } catch (const ConfigError& e) {
      // Re-key the error to the beam that raised it.
      std::string k = e.key();
      if (prefix == "beam2") k.replace(0, 4, "beam2");
      throw ConfigError(k, std::string(e.what()).substr(e.key().size() + 2));
    }
    c.beams.push_back(std::move(b));
  }

  // Medium.
  const std::string mode = doc.count("medium.mode") ? r.text("medium.mode") : "linear";
  Refraction refraction;
  if (mode == "linear") {
    refraction = PrescribedRefraction{GridField(0.0)};
  } else if (mode == "nonlinear") {
    refraction = NonlinearRefraction{r.number("medium.alpha")};
  } else {
    throw ConfigError("medium.mode", "expected linear or nonlinear, got '" + mode + "'");
  }
  const double nu1 = r.number("medium.nu1");
  if (r.text("medium.nu0") == "auto") {
    c.medium = split_absorption(GridField(nu1), refraction);
  } else {
    c.medium.nu0 = r.number("medium.nu0");
    c.medium.nu1 = GridField(nu1);
    c.medium.refraction = refraction;
  }
  c.medium.validate();

  // Absorbing layer.
  c.layer.b = r.number_or("layer.b", 0.1);
  c.layer.beta = r.number_or("layer.beta", 50.0);
  c.layer.validate();

  // Scheme.
  if (r.has("scheme.order")) {
    const long order = parse_integer("scheme.order", r.text("scheme.order"));
    if (order != 1 && order != 2) throw ConfigError("scheme.order", "must be 1 or 2");
    c.scheme_order = static_cast<int>(order);
  }
  if (r.has("scheme.limiter")) {
    auto kind = parse_limiter(r.text("scheme.limiter"));
    if (!kind)
      throw ConfigError("scheme.limiter", "expected vanleer, clamped or superbee");
    c.limiter = *kind;
  }
  if (r.has("scheme.g_mode")) {
    const auto& g = r.text("scheme.g_mode");
    if (g == "analytic")
      c.g_mode = BoundaryGMode::Analytic;
    else if (g == "simplified")
      c.g_mode = BoundaryGMode::Simplified;
    else
      throw ConfigError("scheme.g_mode", "expected analytic or simplified");
  }

  // Output.
  if (r.has("output.dir")) c.output_dir = r.text("output.dir");
  if (r.has("output.stride")) {
    const long stride = parse_integer("output.stride", r.text("output.stride"));
    if (stride < 1) throw ConfigError("output.stride", "must be >= 1");
    c.snapshot_stride = static_cast<std::size_t>(stride);
  }

  // Stability of the transport stage.
  for (std::size_t i = 0; i < c.beams.size(); ++i) {
    const double theta = cfl_number(c.grid, c.beams[i]);
    if (theta > 1.0 + kThetaSnap) {
      throw ConfigError("grid.dx", "CFL number theta = " + format_double(theta) +
                                       " exceeds 1 for beam " + std::to_string(i + 1) +
                                       " (theta = |k_y|/k_x * dx/dy)");
    }
  }

  for (const auto& beam : c.beams)
    if (auto w = edge_leak_warning(sample_incident_profile(beam, c.grid, 0.0),
                                   c.grid.layer_width))
      c.warnings.push_back(*w);

  return c;
}

std::string serialize_config(const RunConfig& c) {
  if (!c.medium.nu1.is_constant())
    throw ConfigError("medium.nu1", "sampled fields cannot be serialized");
  if (const auto* p = std::get_if<PrescribedRefraction>(&c.medium.refraction))
    if (!p->mu.is_constant() || p->mu.constant() != 0.0)
      throw ConfigError("medium.mode", "prescribed refraction cannot be serialized");

  KeyValueDoc d;
  d["grid.dx"] = format_double(c.grid.delta_x);
  d["grid.dy"] = format_double(c.grid.delta_y);
  d["grid.lx"] = format_double(c.grid.length_x());
  d["grid.ly"] = format_double(c.grid.length_y());
  d["grid.y0"] = format_double(c.grid.y_origin);
  d["layer.width"] = std::to_string(c.grid.layer_width);
  for (std::size_t i = 0; i < c.beams.size(); ++i) {
    const std::string prefix = i == 0 ? "beam" : "beam2";
    d[prefix + ".kx"] = format_double(c.beams[i].k_x);
    d[prefix + ".ky"] = format_double(c.beams[i].k_y);
    d[prefix + ".speckles"] = format_speckles(c.beams[i].speckles);
  }
  d["beam.epsilon"] = format_double(c.beam().epsilon);
  d["medium.nu0"] = format_double(c.medium.nu0);
  d["medium.nu1"] = format_double(c.medium.nu1.constant());
  if (c.medium.is_nonlinear()) {
    d["medium.mode"] = "nonlinear";
    d["medium.alpha"] = format_double(c.medium.alpha());
  } else {
    d["medium.mode"] = "linear";
  }
  d["layer.b"] = format_double(c.layer.b);
  d["layer.beta"] = format_double(c.layer.beta);
  d["scheme.order"] = std::to_string(c.scheme_order);
  d["scheme.limiter"] = std::string(to_string(c.limiter));
  d["scheme.g_mode"] = c.g_mode == BoundaryGMode::Analytic ? "analytic" : "simplified";
  d["output.dir"] = c.output_dir;
  d["output.stride"] = std::to_string(c.snapshot_stride);
  return format_document(d);
}

double cfl_number(const GridSpec& grid, const BeamSpec& beam) {
  return std::abs(beam.k_y) / beam.k_x * grid.delta_x / grid.delta_y;
}

Complex incident_value(const BeamSpec& beam, double x, double y) {
  Complex sum{0.0, 0.0};
  for (const auto& s : beam.speckles) {
    const double transverse = beam.k_x * (y - s.center) - beam.k_y * x;
    const double q = transverse / s.width;
    sum += s.amplitude * std::exp(-q * q) * std::polar(1.0, s.phase);
  }
  return sum;
}

FieldLine sample_incident_profile(const BeamSpec& beam, const GridSpec& grid,
                                  double x) {
  FieldLine line(grid.n_y);
  for (std::size_t j = 0; j < grid.n_y; ++j)
    line.values[j] = incident_value(beam, x, grid.y_at(j));
  return line;
}

std::optional<std::string> edge_leak_warning(const FieldLine& line,
                                             std::size_t layer_width,
                                             double threshold) {
  const std::size_t n = line.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (j <= layer_width || j + layer_width >= n - 1)
      worst = std::max(worst, std::abs(line.values[j]));
  if (worst < threshold) return std::nullopt;
  return "incident profile reaches " + format_double(worst) +
         " inside the absorbing layers (threshold " + format_double(threshold) +
         "); transform wrap-around may be visible";
}

}  // namespace tiltprop
