// Command-line front end. Links only the C interface.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tiltprop/tiltprop.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;

int exit_code(tp_status s) {
  switch (s) {
    case TP_OK: return kExitOk;
    case TP_ERR_CONFIG: return kExitConfig;
    case TP_ERR_BLOWUP: return kExitBlowUp;
    default: return kExitFailure;
  }
}

int report(tp_status s) {
  if (s != TP_OK)
    std::fprintf(stderr, "tiltprop: %s: %s\n", tp_status_name(s), tp_last_error());
  return exit_code(s);
}

// Owns a configuration loaded from a file and prints its warnings.
struct Config {
  tp_config* handle = nullptr;
  ~Config() { tp_config_free(handle); }

  tp_status load(const std::string& path) {
    const tp_status s = tp_config_load(path.c_str(), &handle);
    if (s == TP_OK)
      for (size_t i = 0; i < tp_config_warning_count(handle); ++i)
        std::fprintf(stderr, "warning: %s\n", tp_config_warning(handle, i));
    return s;
  }
};

int emit_table(tp_status s, tp_table* table, const std::string& csv_path) {
  if (s != TP_OK) return report(s);
  char* text = nullptr;
  s = tp_table_csv(table, &text);
  tp_table_free(table);
  if (s != TP_OK) return report(s);
  std::fputs(text, stdout);
  int code = kExitOk;
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    out << text;
    if (!out) {
      std::fprintf(stderr, "tiltprop: cannot write %s\n", csv_path.c_str());
      code = kExitFailure;
    }
  }
  tp_string_free(text);
  return code;
}

int simulate(const std::string& config_path, std::string out_dir) {
  Config cfg;
  if (tp_status s = cfg.load(config_path); s != TP_OK) return report(s);
  if (out_dir.empty()) out_dir = tp_config_output_dir(cfg.handle);
  tp_run* run = nullptr;
  if (tp_status s = tp_simulate(cfg.handle, &run); s != TP_OK) return report(s);
  tp_metrics m{};
  tp_run_metrics(run, &m);
  tp_energy_balance b{};
  tp_status s = tp_run_energy_balance(run, &b);
  if (s == TP_OK) s = tp_run_write_outputs(run, out_dir.c_str());
  tp_run_free(run);
  if (s != TP_OK) return report(s);
  std::printf("grid            %zu x %zu (%zu ray%s)\n", m.n_x, m.n_y, m.rays,
              m.rays == 1 ? "" : "s");
  std::printf("max |u|^2       %.6g at (%.4g, %.4g)\n", m.max_energy, m.max_x, m.max_y);
  std::printf("focusing dist.  %.6g\n", m.focusing_distance);
  std::printf("total energy    %.6g\n", m.total_energy);
  std::printf("energy in/out   %.6g / %.6g\n", m.entrance_energy, m.exit_energy);
  std::printf("balance resid.  %.3e, %.3e with spectral losses (bound %s)\n",
              b.residual, b.closed_residual, b.prop1_holds ? "holds" : "violated");
  std::printf("outputs         %s\n", out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paraxial beam propagation in a tilted frame"};
  app.require_subcommand(1);

  std::string config_path;
  std::string csv_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Configuration file")->required();
    sub->add_option("--csv", csv_path, "Also write the table to this file");
  };

  auto* sim = app.add_subcommand("simulate", "March one configuration and write outputs");
  std::string out_dir;
  sim->add_option("--config", config_path, "Configuration file")->required();
  sim->add_option("--out", out_dir, "Output directory (default: output.dir)");

  auto* conv = app.add_subcommand("converge", "Mesh convergence at CFL = 1");
  std::vector<double> meshes{1.6, 0.8, 0.4, 0.2, 0.1};
  double ref_mesh = 0.05;
  add_common(conv);
  conv->add_option("--meshes", meshes, "Mesh sizes")->delimiter(',');
  conv->add_option("--ref", ref_mesh, "Reference mesh size");

  auto* cfl = app.add_subcommand("cfl-sweep", "Accuracy against the CFL number");
  std::vector<double> cfls{0.5, 0.6, 0.75, 0.875, 1.0};
  int order = 1;
  std::string limiter = "vanleer";
  double dy = 0.1;
  add_common(cfl);
  cfl->add_option("--cfls", cfls, "CFL numbers")->delimiter(',');
  cfl->add_option("--order", order, "Scheme order")->check(CLI::IsMember({1, 2}));
  cfl->add_option("--limiter", limiter, "Flux limiter")
      ->check(CLI::IsMember({"vanleer", "clamped", "superbee"}));
  cfl->add_option("--dy", dy, "Transverse step");
  cfl->add_option("--ref", ref_mesh, "Reference mesh size");

  auto* layer = app.add_subcommand("layer-sweep", "Sensitivity to the absorbing layers");
  std::vector<double> bs{0, 0.1, 0.2, 0.5, 1};
  std::vector<double> betas{10, 30, 50, 100};
  double mesh = 0.2;
  add_common(layer);
  layer->add_option("--b", bs, "Layer strengths")->delimiter(',');
  layer->add_option("--beta", betas, "Layer growth factors")->delimiter(',');
  layer->add_option("--mesh", mesh, "Mesh size");

  auto* nu = app.add_subcommand("nu-split", "Sensitivity to the nu0/nu1 split");
  std::vector<double> ratios{0, 0.1, 0.3, 0.5, 0.7, 0.9, 1};
  double nu_total = 1e-3;
  add_common(nu);
  nu->add_option("--ratios", ratios, "nu0/nu ratios")->delimiter(',');
  nu->add_option("--nu", nu_total, "Total absorption");

  auto* angle = app.add_subcommand("angle-sweep", "Robustness to the incidence angle");
  std::vector<double> angles{5, 30, 45, 60};
  std::vector<double> dxs{0.23, 0.16, 0.2, 0.16};
  std::vector<double> dys{0.02, 0.1, 0.2, 0.27};
  double ref_focus = 59.7;
  double ref_max = 2.14;
  add_common(angle);
  angle->add_option("--angles", angles, "Incidence angles in degrees")->delimiter(',');
  angle->add_option("--dx", dxs, "Step along x per angle")->delimiter(',');
  angle->add_option("--dy", dys, "Step along y per angle")->delimiter(',');
  angle->add_option("--ref-focus", ref_focus, "Reference focusing distance");
  angle->add_option("--ref-max", ref_max, "Reference maximum of |u|^2");

  auto* two = app.add_subcommand("two-ray", "Interacting rays against their superposition");
  add_common(two);

  auto* limits = app.add_subcommand("limits-check", "k_y -> 0, eps -> 0 and alpha = 0 checks");
  add_common(limits);

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return simulate(config_path, out_dir);

  Config cfg;
  if (tp_status s = cfg.load(config_path); s != TP_OK) return report(s);
  tp_table* table = nullptr;
  tp_status s = TP_OK;
  if (conv->parsed()) {
    s = tp_converge(cfg.handle, meshes.data(), meshes.size(), ref_mesh, &table);
  } else if (cfl->parsed()) {
    s = tp_cfl_sweep(cfg.handle, cfls.data(), cfls.size(), order, limiter.c_str(), dy,
                     ref_mesh, &table);
  } else if (layer->parsed()) {
    s = tp_layer_sweep(cfg.handle, bs.data(), bs.size(), betas.data(), betas.size(), mesh,
                       &table);
  } else if (nu->parsed()) {
    s = tp_nu_split_sweep(cfg.handle, nu_total, ratios.data(), ratios.size(), &table);
  } else if (angle->parsed()) {
    if (dxs.size() != angles.size() || dys.size() != angles.size()) {
      std::fprintf(stderr, "tiltprop: --angles, --dx and --dy need the same length\n");
      return kExitFailure;
    }
    s = tp_angle_sweep(cfg.handle, angles.data(), dxs.data(), dys.data(), angles.size(),
                       ref_focus, ref_max, &table);
  } else if (two->parsed()) {
    s = tp_two_ray(cfg.handle, &table);
  } else if (limits->parsed()) {
    s = tp_limits_check(cfg.handle, &table);
  }
  return emit_table(s, table, csv_path);
}
