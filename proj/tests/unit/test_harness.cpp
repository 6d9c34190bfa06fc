#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/harness.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace tiltprop;

namespace {

const std::vector<std::string> kComparison = {"energy_error", "focusing_distance",
                                              "focusing_error", "max_energy",
                                              "max_energy_error"};

std::vector<std::string> lead(std::vector<std::string> first) {
  first.insert(first.end(), kComparison.begin(), kComparison.end());
  return first;
}

}  // namespace

TEST_CASE("tables") {
  const Table t{{"a", "b"}, {{1.0, 0.25}, {-3.0, 1e-12}}};
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), std::out_of_range);
  CHECK(t.at(1, "a") == -3.0);
  CHECK(t.to_csv() == "a,b\n1,0.25\n-3,1e-12\n");
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("derived configurations keep the base document") {
  const RunConfig base = fixtures::small({{"medium.nu1", "4e-3"}});
  const RunConfig d = derive_config(base, {{"grid.dx", "0.05"}});
  CHECK(d.grid.delta_x == 0.05);
  CHECK(d.grid.n_x == 128);
  CHECK(d.medium.nu1.constant() == 4e-3);
}

TEST_CASE("convergence harness") {
  const RunConfig base = fixtures::small({{"medium.mode", "nonlinear"}, {"medium.alpha", "0.5"}});
  SUBCASE("the reference mesh against itself") {
    const Table t = convergence_harness(base, {0.1}, 0.1);
    CHECK(t.columns == lead({"mesh"}));
    REQUIRE(t.rows.size() == 1);
    CHECK(t.at(0, "mesh") == 0.1);
    CHECK(t.at(0, "energy_error") == 0.0);
    CHECK(t.at(0, "focusing_error") == 0.0);
    CHECK(t.at(0, "max_energy_error") == 0.0);
  }
  SUBCASE("errors shrink under refinement") {
    const Table t = convergence_harness(base, {0.2, 0.1}, 0.025);
    CHECK(t.at(1, "energy_error") < t.at(0, "energy_error"));
    CHECK(t.at(1, "energy_error") > 0.0);
  }
}

TEST_CASE("cfl sweep") {
  const RunConfig base = fixtures::small();
  const Table t = cfl_sweep(base, {1.0, 0.5}, 1, LimiterKind::VanLeer, 0.1, 0.1);
  CHECK(t.columns == lead({"cfl", "dx"}));
  CHECK(t.at(0, "dx") == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(t.at(1, "dx") == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(t.at(0, "energy_error") < 1e-12);
  CHECK(t.at(1, "energy_error") > 1e-4);
  CHECK_THROWS_AS(cfl_sweep(fixtures::small({{"beam.angle_deg", "0"}}), {0.5}, 1,
                            LimiterKind::VanLeer, 0.1, 0.1),
                  std::invalid_argument);
}

TEST_CASE("layer sweep") {
  const RunConfig base = fixtures::small({{"grid.lx", "12.8"}});
  const Table t = layer_sweep(base, {0.1, 0.0}, {50.0}, 0.1);
  CHECK(t.columns == std::vector<std::string>{"b", "beta", "energy_error", "max_energy_error"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.at(0, "energy_error") == 0.0);
  CHECK(t.at(1, "b") == 0.0);
  CHECK(t.at(1, "energy_error") > 1e-3);
}

TEST_CASE("absorption split sweep") {
  const Table t = nu_split_sweep(fixtures::small(), 2e-3, {0.5, 1.0, 0.0});
  CHECK(t.columns == lead({"ratio"}));
  CHECK(t.at(0, "energy_error") == 0.0);
  CHECK(t.at(1, "energy_error") > 0.0);
  CHECK(t.at(2, "energy_error") < 1e-2);
}

TEST_CASE("angle sweep widens delta_y when the pair violates the CFL condition") {
  const Table t = angle_sweep(fixtures::small({{"grid.ly", "25.6"}}),
                              {{30, 0.1, 0.1}, {60, 0.16, 0.27}}, 5.0, 1.0);
  CHECK(t.columns == std::vector<std::string>{"angle", "dx", "dy", "cfl", "max_energy",
                                              "max_energy_error", "focusing_distance",
                                              "focusing_error"});
  CHECK(t.at(0, "dy") == 0.1);
  CHECK(t.at(0, "cfl") == doctest::Approx(std::tan(M_PI / 6)).epsilon(1e-14));
  CHECK(t.at(1, "dx") == 0.16);
  CHECK(t.at(1, "dy") == doctest::Approx(0.16 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(t.at(1, "cfl") == 1.0);
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(t.at(r, "max_energy_error") ==
          doctest::Approx(std::abs(t.at(r, "max_energy") - 1.0)).epsilon(1e-14));
    CHECK(t.at(r, "focusing_error") ==
          doctest::Approx(std::abs(t.at(r, "focusing_distance") - 5.0) / 5.0).epsilon(1e-14));
  }
}

TEST_CASE("two-ray comparison") {
  KeyValueDoc o = {{"beam.angle_deg", "30"},
                   {"beam2.angle_deg", "-30"},
                   {"beam.speckles", "1:5:0.8:0"},
                   {"beam2.speckles", "1:7.8:0.8:0"},
                   {"medium.mode", "nonlinear"},
                   {"medium.alpha", "0"}};
  const Table linear = two_ray_comparison(fixtures::small(o));
  CHECK(linear.columns == std::vector<std::string>{"interacting_max", "superposed_max", "gain"});
  CHECK(linear.at(0, "gain") == doctest::Approx(1.0).epsilon(1e-6));
  o["medium.alpha"] = "1";
  const Table coupled = two_ray_comparison(fixtures::small(o));
  CHECK(std::abs(coupled.at(0, "gain") - 1.0) > 1e-3);
  CHECK_THROWS_AS(two_ray_comparison(fixtures::small()), ConfigError);
}

TEST_CASE("classical reference matches the march at normal incidence") {
  const RunConfig c = fixtures::small({{"beam.angle_deg", ""},
                                       {"beam.kx", "1"},
                                       {"beam.ky", "0"},
                                       {"beam.speckles", "1:6:0.8:0.3"},
                                       {"medium.mode", "nonlinear"},
                                       {"medium.alpha", "1"}});
  const ComplexPlane ref = schrodinger_reference(c);
  MarchOptions o;
  o.keep_fields = true;
  const MarchState s = march_one_ray(c, o);
  CHECK(oracle::rel_l2(s.fields[0].values, ref.values) < 1e-12);
}

TEST_CASE("limits check passes on a small case") {
  const Table t = limits_check(fixtures::small({{"medium.mode", "nonlinear"},
                                                {"medium.alpha", "0.5"}}));
  CHECK(t.columns == std::vector<std::string>{"check", "value", "tolerance", "pass"});
  REQUIRE(t.rows.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(t.at(r, "check") == static_cast<double>(r + 1));
    CHECK(t.at(r, "pass") == 1.0);
  }
}
