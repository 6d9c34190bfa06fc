#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "core/errors.hpp"
#include "core/output.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "synthetic.hpp"

using namespace tiltprop;

namespace {

struct Pgm {
  std::size_t width = 0, height = 0;
  std::string pixels;
};

Pgm read_pgm(const std::string& data) {
  std::istringstream in(data);
  std::string magic;
  int depth = 0;
  Pgm p;
  in >> magic >> p.width >> p.height >> depth;
  in.get();
  REQUIRE(magic == "P5");
  REQUIRE(depth == 255);
  p.pixels = data.substr(static_cast<std::size_t>(in.tellg()));
  REQUIRE(p.pixels.size() == p.width * p.height);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("a zero field gives zero text and a black image") {
  const MarchState s = fixtures::synthetic(0.1, 0.1, 3, 8, std::vector<float>(4 * 8, 0.0f));
  const std::string csv = intensity_csv(s);
  CHECK(csv.rfind("# 4 8 ", 0) == 0);
  const std::string body = csv.substr(csv.find('\n') + 1);
  CHECK(body == "0,0,0,0,0,0,0,0\n0,0,0,0,0,0,0,0\n0,0,0,0,0,0,0,0\n0,0,0,0,0,0,0,0\n");
  const Pgm p = read_pgm(intensity_pgm(s));
  CHECK(p.width == 4);
  CHECK(p.height == 8);
  CHECK(std::all_of(p.pixels.begin(), p.pixels.end(), [](char c) { return c == 0; }));
}

TEST_CASE("the brightest pixel sits at the maximum, y upwards") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> I(13 * 32);
    for (auto& v : I) v = unit(rng);
    const std::size_t n = rng() % 13, j = rng() % 32;
    I[n * 32 + j] = 2.0f;
    const Pgm p = read_pgm(intensity_pgm(fixtures::synthetic(0.1, 0.1, 12, 32, I)));
    const auto at = [&](std::size_t col, std::size_t row) {
      return static_cast<unsigned char>(p.pixels[row * p.width + col]);
    };
    CHECK(at(n, 31 - j) == 255);
    std::size_t bright = 0;
    for (char c : p.pixels) bright += static_cast<unsigned char>(c) == 255;
    CHECK(bright == 1);
    // Grey level is linear in the intensity.
    const std::size_t k = rng() % 13, i = rng() % 32;
    if (k != n || i != j)
      CHECK(at(k, 31 - i) == static_cast<unsigned char>(std::lround(255.0 * I[k * 32 + i] / 2.0)));
  }
}

TEST_CASE("intensity text round trips bit for bit") {
  const MarchState s = march_one_ray(fixtures::small({{"output.stride", "3"}}));
  const IntensityGrid g = parse_intensity_csv(intensity_csv(s));
  CHECK(g.rows == s.snapshot_steps.size());
  CHECK(g.n_y == s.grid.n_y);
  CHECK(g.row_spacing == doctest::Approx(0.3));
  CHECK(g.delta_y == s.grid.delta_y);
  CHECK(g.values == s.snapshots);

  std::mt19937_64 rng(23);
  std::vector<float> I(5 * 16);
  for (auto& v : I) {
    const std::uint32_t bits = static_cast<std::uint32_t>(rng()) & 0x7f7fffffu;
    std::memcpy(&v, &bits, sizeof v);
  }
  const MarchState r = fixtures::synthetic(0.1, 0.1, 4, 16, I);
  CHECK(parse_intensity_csv(intensity_csv(r)).values == I);
}

TEST_CASE("malformed intensity text") {
  CHECK_THROWS_AS(parse_intensity_csv(""), IoError);
  CHECK_THROWS_AS(parse_intensity_csv("# 2 2 0.1\n"), IoError);
  CHECK_THROWS_AS(parse_intensity_csv("# 1 2 0.1 0.1\n1,x\n"), IoError);
  CHECK_THROWS_AS(parse_intensity_csv("# 2 2 0.1 0.1\n1,2\n"), IoError);
  CHECK_THROWS_AS(read_intensity_csv("/nonexistent/intensity.csv"), IoError);
}

TEST_CASE("emitted files are deterministic") {
  const auto root = std::filesystem::temp_directory_path() / "tiltprop_test_output";
  std::filesystem::remove_all(root);
  const RunConfig c = fixtures::small({{"medium.mode", "nonlinear"}, {"medium.alpha", "0.3"}});
  for (const char* run : {"a", "b"}) {
    const MarchState s = march_one_ray(c);
    emit_outputs(s, beam_metrics(s), (root / run).string());
  }
  for (const char* f : {"metrics.csv", "summary.csv", "intensity.csv", "intensity.pgm"}) {
    const std::string a = slurp(root / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(root / "b" / f));
  }
  const std::string metrics = slurp(root / "a" / "metrics.csv");
  CHECK(metrics.rfind("n,x,energy,max_intensity\n", 0) == 0);
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 66);
  CHECK(read_intensity_csv((root / "a" / "intensity.csv").string()).rows == 65);
  std::filesystem::remove_all(root);
}

TEST_CASE("unwritable destinations raise IoError with the path") {
  const MarchState s = fixtures::synthetic(0.1, 0.1, 1, 4, std::vector<float>(8, 1.0f));
  const auto blocker = std::filesystem::temp_directory_path() / "tiltprop_blocker";
  { std::ofstream(blocker) << "x"; }
  try {
    emit_outputs(s, beam_metrics(s), (blocker / "out").string());
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path().find("tiltprop_blocker") != std::string::npos);
  }
  std::filesystem::remove(blocker);
}
