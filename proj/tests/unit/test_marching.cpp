#include <algorithm>
#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/marching.hpp"
#include "core/spectral.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace tiltprop;

namespace {

MarchOptions keep_fields() {
  MarchOptions o;
  o.keep_fields = true;
  return o;
}

std::vector<Complex> row(const MarchState& s, std::size_t ray, std::size_t n) {
  const auto r = s.fields.at(ray).row(n);
  return {r.begin(), r.end()};
}

// Closed-form g for Gaussian speckles: u_in times 1 - i eps k_y Y / (k_x L_s^2).
std::vector<Complex> g_oracle(const BeamSpec& b, const GridSpec& grid) {
  std::vector<Complex> g(grid.n_y);
  for (std::size_t j = 0; j < grid.n_y; ++j) {
    const double y = grid.y_at(j);
    for (const auto& s : b.speckles) {
      const double big_y = b.k_x * (y - s.center);
      const double q = big_y / s.width;
      g[j] += s.amplitude * std::exp(-q * q) * std::polar(1.0, s.phase) *
              Complex(1.0, -b.epsilon * b.k_y * big_y / (b.k_x * s.width * s.width));
    }
  }
  return g;
}

oracle::Beam to_oracle(const BeamSpec& b) {
  return {static_cast<long double>(b.k_x), static_cast<long double>(b.k_y),
          static_cast<long double>(b.epsilon)};
}

}  // namespace

TEST_CASE("theta = 1, mu = 0, constant nu: every station equals the analytic solution") {
  for (const char* angle : {"45", "-45"}) {
    for (const char* nu : {"0", "1e-3", "0.02"}) {
      const RunConfig c = fixtures::small({{"grid.lx", "12.8"},
                                           {"grid.ly", "102.4"},
                                           {"beam.angle_deg", angle},
                                           {"beam.speckles", "1:51.2:2.5:0.5"},
                                           {"medium.nu0", nu},
                                           {"medium.nu1", "0"},
                                           {"layer.b", "0"}});
      REQUIRE(c.theta() == 1.0);
      const MarchState s = march_one_ray(c, keep_fields());
      const SpectralGrid sg = SpectralGrid::for_grid(c.grid);
      const FieldLine g = boundary_data_g(c.beam(), c.grid);
      double worst = 0.0;
      for (std::size_t n = 0; n <= c.grid.n_x; ++n) {
        const FieldLine exact =
            analytic_halfspace_solution(g, c.grid.x_at(n), c.medium.nu0, c.beam(), sg);
        worst = std::max(worst, oracle::rel_l2(row(s, 0, n), exact.values));
      }
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("k_y = 0 reduces to a classical split-step Schrodinger march") {
  for (const char* ky : {"0", "1e-12"}) {
    RunConfig c = fixtures::small({{"beam.angle_deg", ""},
                                   {"beam.kx", "1"},
                                   {"beam.ky", ky},
                                   {"beam.speckles", "1:6.4:1:0;0.5:5:0.7:1.3"},
                                   {"medium.mode", "nonlinear"},
                                   {"medium.alpha", "0.5"},
                                   {"medium.nu0", "2e-3"},
                                   {"medium.nu1", "1e-2"}});
    const MarchState s = march_one_ray(c, keep_fields());

    const GridSpec& g = c.grid;
    const double dx = g.delta_x, dy = g.delta_y;
    const auto layer = oracle::absorbing(0.1, 50.0, g.n_y, g.layer_width);
    std::vector<Complex> u(g.n_y);
    for (std::size_t j = 0; j < g.n_y; ++j) {
      const double y = g.y_at(j);
      u[j] = std::exp(-std::pow((y - 6.4) / 1.0, 2)) +
             0.5 * std::exp(-std::pow((y - 5.0) / 0.7, 2)) * std::polar(1.0, 1.3);
    }
    double worst = oracle::rel_l2(row(s, 0, 0), u);
    for (std::size_t n = 0; n < g.n_x; ++n) {
      u = oracle::apply_bins(u, dy, [&](double eta) {
        return std::exp(Complex(-2e-3, -0.5 * 0.05 * eta * eta) * dx);
      });
      for (std::size_t j = 0; j < g.n_y; ++j) {
        const double mu = std::exp(-0.5 * std::norm(u[j])) - 1.0;
        const Complex half = 0.5 * dx * Complex(1e-2, mu);
        u[j] = (1.0 - half) * u[j] / (1.0 + half + dx * layer[j]);
      }
      worst = std::max(worst, oracle::rel_l2(row(s, 0, n + 1), u));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("two-ray runs") {
  const KeyValueDoc nonlinear = {{"grid.lx", "3.2"},
                                 {"beam.angle_deg", "30"},
                                 {"beam2.angle_deg", "-30"},
                                 {"beam.speckles", "1:5:0.8:0"},
                                 {"beam2.speckles", "1:7.8:0.8:0.4"},
                                 {"grid.dx", "0.1"},
                                 {"medium.mode", "nonlinear"},
                                 {"medium.alpha", "0.8"}};

  SUBCASE("a silent second ray leaves the first untouched") {
    KeyValueDoc o = nonlinear;
    o["beam2.speckles"] = "0:7.8:0.8:0";
    const RunConfig two = fixtures::small(o);
    o["beam2.angle_deg"] = "";
    o["beam2.speckles"] = "";
    const RunConfig one = fixtures::small(o);
    const MarchState a = march_two_ray(two, keep_fields());
    const MarchState b = march_one_ray(one, keep_fields());
    CHECK(a.fields[0].values == b.fields[0].values);
  }

  SUBCASE("alpha = 0 is the superposition of independent rays") {
    KeyValueDoc o = nonlinear;
    o["medium.alpha"] = "0";
    const MarchState both = march_two_ray(fixtures::small(o), keep_fields());
    KeyValueDoc first = o, second = o;
    first["beam2.angle_deg"] = "";
    first["beam2.speckles"] = "";
    second["beam.angle_deg"] = "-30";
    second["beam.speckles"] = o["beam2.speckles"];
    second["beam2.angle_deg"] = "";
    second["beam2.speckles"] = "";
    const MarchState a = march_one_ray(fixtures::small(first), keep_fields());
    const MarchState b = march_one_ray(fixtures::small(second), keep_fields());
    CHECK(oracle::rel_l2(both.fields[0].values, a.fields[0].values) <= 1e-10);
    CHECK(oracle::rel_l2(both.fields[1].values, b.fields[0].values) <= 1e-10);
    for (std::size_t n = 0; n < both.stations.size(); ++n)
      CHECK(both.stations[n].energy ==
            doctest::Approx(a.stations[n].energy + b.stations[n].energy).epsilon(1e-12));
  }

  SUBCASE("coupling changes the trajectory") {
    const MarchState both = march_two_ray(fixtures::small(nonlinear), keep_fields());
    KeyValueDoc first = nonlinear;
    first["beam2.angle_deg"] = "";
    first["beam2.speckles"] = "";
    const MarchState a = march_one_ray(fixtures::small(first), keep_fields());
    CHECK(oracle::rel_l2(both.fields[0].values, a.fields[0].values) > 1e-6);
  }

  SUBCASE("a second beam is required") {
    CHECK_THROWS_AS(march_two_ray(fixtures::small()), ConfigError);
  }
}

TEST_CASE("mirror symmetry") {
  // Profiles stay clear of both edges so the Nyquist bin, whose frequency
  // keeps its sign under reflection, carries nothing.
  auto mirrored = [](KeyValueDoc o, double tolerance) {
    o["beam.angle_deg"] = "40";
    o["grid.dx"] = "0.05";
    o["grid.ly"] = "25.6";
    o["beam.speckles"] = "1:10:1:0.2;0.6:9:1.2:1";
    const RunConfig c = fixtures::small(o);
    const double mid = 0.5 * (c.grid.y_at(0) + c.grid.y_at(c.grid.n_y - 1));
    o["beam.angle_deg"] = "-40";
    o["beam.speckles"] = "1:" + std::to_string(2 * mid - 10) + ":1:0.2;0.6:" +
                         std::to_string(2 * mid - 9) + ":1.2:1";
    const MarchState a = march_one_ray(c, keep_fields());
    const MarchState b = march_one_ray(fixtures::small(o), keep_fields());
    double worst = 0.0;
    for (std::size_t n = 0; n < a.stations.size(); ++n) {
      auto r = row(b, 0, n);
      std::reverse(r.begin(), r.end());
      worst = std::max(worst, oracle::rel_l2(r, row(a, 0, n)));
    }
    CHECK(worst <= tolerance);
  };
  mirrored({}, 1e-12);
  // Self-focusing amplifies the rounding differences of the two transforms.
  mirrored({{"medium.mode", "nonlinear"}, {"medium.alpha", "0.05"}}, 1e-10);
}

TEST_CASE("time-envelope step") {
  SUBCASE("an infinite time step recovers the stationary march") {
    RunConfig c = fixtures::small({{"medium.nu0", "1e-3"}, {"medium.nu1", "0"}});
    c.medium.refraction = PrescribedRefraction{GridField(0.02)};
    const MarchState stationary = march_one_ray(c, keep_fields());

    TimeEnvelopeParams p;
    p.delta_t = 1e30;
    p.nu_diamond = 2e-3;
    p.k0 = 1.0;
    p.delta_n = GridField(0.04);
    ComplexPlane u_ini(c.grid.stations(), c.grid.n_y);
    for (auto& v : u_ini.values) v = Complex(1.0, -2.0);
    const MarchState env = time_envelope_step(u_ini, p, c, keep_fields());
    CHECK(oracle::rel_l2(env.fields[0].values, stationary.fields[0].values) <= 1e-8);
  }

  SUBCASE("zero initial field is the homogeneous solve") {
    const RunConfig c = fixtures::small();
    TimeEnvelopeParams p;
    p.delta_t = 0.05;
    p.n_mean = 0.2;
    p.delta_n = GridField(0.01);
    const MarchState empty = time_envelope_step(ComplexPlane{}, p, c, keep_fields());
    const MarchState zero =
        time_envelope_step(ComplexPlane(c.grid.stations(), c.grid.n_y), p, c, keep_fields());
    CHECK(empty.fields[0].values == zero.fields[0].values);
  }

  SUBCASE("matches a dense step-by-step evaluation") {
    const RunConfig c = fixtures::small({{"grid.lx", "0.6"},
                                         {"grid.ly", "3.2"},
                                         {"grid.dx", "0.07"},
                                         {"scheme.order", "2"},
                                         {"scheme.limiter", "superbee"},
                                         {"beam.speckles", "1:1.6:0.5:0.3"}});
    const GridSpec& g = c.grid;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> dn(g.stations() * g.n_y);
    for (auto& v : dn) v = 0.1 * u01(rng) - 0.05;
    ComplexPlane u_ini(g.stations(), g.n_y);
    for (auto& v : u_ini.values) v = Complex(u01(rng), u01(rng));

    TimeEnvelopeParams p;
    p.n_mean = 0.3;
    p.delta_t = 0.01;
    p.k0 = 2.0;
    p.nu_diamond = 0.05;
    p.delta_n = GridField(g.stations(), g.n_y, dn);
    const MarchState s = time_envelope_step(u_ini, p, c, keep_fields());

    const double root = std::sqrt(1.0 - 0.3);
    const double nu = 1.0 / (299.792458 * root * 0.01) + 0.05 / (2.0 * root);
    const auto ob = to_oracle(c.beam());
    auto u = oracle::apply_bins(g_oracle(c.beam(), g), g.delta_y, [&](double eta) {
      return oracle::to_double(2.0L / (1.0L + oracle::root(eta, nu, ob)));
    });
    double worst = oracle::rel_l2(row(s, 0, 0), u);
    oracle::StepInput in;
    in.theta = c.theta();
    in.rate = c.beam().k_x / g.delta_x;
    in.order = 2;
    in.limiter = 2;
    in.nu1.assign(g.n_y, 0.0);
    in.absorbing = oracle::absorbing(0.1, 50.0, g.n_y, g.layer_width);
    for (std::size_t n = 0; n < g.n_x; ++n) {
      u = oracle::apply_bins(u, g.delta_y, [&](double eta) {
        return std::exp(oracle::to_double(oracle::exponent(eta, nu, ob)) * g.delta_x);
      });
      in.mu.resize(g.n_y);
      in.source.resize(g.n_y);
      for (std::size_t j = 0; j < g.n_y; ++j) {
        in.mu[j] = 2.0 / (2.0 * root) * dn[n * g.n_y + j];
        in.source[j] = u_ini.row(n + 1)[j] / (299.792458 * root * 0.01);
      }
      u = oracle::transport(u, in);
      worst = std::max(worst, oracle::rel_l2(row(s, 0, n + 1), u));
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("invalid parameters") {
    TimeEnvelopeParams p;
    p.n_mean = 1.0;
    CHECK_THROWS_AS(time_envelope_step(ComplexPlane{}, p, fixtures::small()), ConfigError);
    p.n_mean = 0.0;
    p.delta_t = 0.0;
    CHECK_THROWS_AS(time_envelope_step(ComplexPlane{}, p, fixtures::small()), ConfigError);
  }
}

TEST_CASE("blow-up aborts with the step index") {
  const RunConfig c = fixtures::small({{"beam.speckles", "2e6:4:0.6:0"}});
  try {
    march_one_ray(c);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.step() == 1);
  }
}

TEST_CASE("snapshots follow the stride") {
  const RunConfig c = fixtures::small({{"output.stride", "5"}});
  const MarchState s = march_one_ray(c);
  CHECK(s.snapshot_steps.size() == c.grid.n_x / 5 + 1);
  CHECK(s.snapshot_index(10) == 2);
  CHECK(s.snapshot_index(11) == MarchState::npos);
  CHECK(s.snapshots.size() == s.snapshot_steps.size() * c.grid.n_y);
  for (std::size_t k = 0; k < s.snapshot_steps.size(); ++k) {
    const std::size_t n = s.snapshot_steps[k];
    double e = 0.0;
    for (float v : s.snapshot(k)) e += v;
    CHECK(e * c.grid.delta_y == doctest::Approx(s.stations[n].energy).epsilon(1e-6));
  }
}

TEST_CASE("energy balance") {
  SUBCASE("no absorption means nothing absorbed") {
    const MarchState s = march_one_ray(fixtures::small({{"medium.nu0", "0"}, {"medium.nu1", "0"}}));
    CHECK(energy_balance_report(s, fixtures::small()).absorbed == 0.0);
  }

  SUBCASE("constant absorption: bound holds and the residual shrinks with the mesh") {
    double previous = 1.0;
    for (const char* h : {"0.2", "0.1", "0.05", "0.025"}) {
      const RunConfig c = fixtures::small({{"grid.dx", h},
                                           {"grid.dy", h},
                                           {"grid.lx", "12.8"},
                                           {"grid.ly", "51.2"},
                                           {"beam.speckles", "1:20:2:0"},
                                           {"medium.nu0", "0.01"},
                                           {"medium.nu1", "0.01"}});
      const EnergyBalance b = energy_balance_report(march_one_ray(c), c);
      CHECK(b.prop1_holds);
      CHECK(b.absorbed + b.boundary < 0.99 * b.prop1_bound);
      CHECK(b.layer_loss < 1e-6 * b.boundary);
      CHECK(std::abs(b.residual) < previous);
      previous = std::abs(b.residual);
    }
    CHECK(previous < 2e-3);
  }

  SUBCASE("nonlinear reference run satisfies the bound") {
    const RunConfig c = parse_config(fixtures::kReference);
    const EnergyBalance b = energy_balance_report(march_one_ray(c), c);
    CHECK(b.prop1_holds);
    CHECK(std::abs(b.closed_residual) < 0.02);
  }
}
