#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eschlab/errors.hpp"
#include "eschlab/lab.hpp"
#include "eschlab/model.hpp"

namespace {

void print_outcome(const eschlab::ExperimentPreset& preset, const eschlab::PresetOutcome& out) {
  std::printf("preset %s -> %s\n", preset.name.c_str(), preset.out_dir.c_str());
  for (const auto& row : out.summary) {
    std::printf("  eps=%-8g mbar=%-6g t=%-8g interfaces=%zu", row.epsilon, row.mbar, row.final_time,
                row.interfaces.size());
    if (row.interface_error) std::printf(" iface_err=%.3e", *row.interface_error);
    if (row.max_energy_gap) std::printf(" energy_gap=%.3e", *row.max_energy_gap);
    std::printf(" mass_drift=%.2e %s\n", row.mass_drift, row.status.c_str());
  }
  if (const auto& ev = out.sharp.event()) {
    std::printf("  sharp event: %s at t = %.6g\n", ev->kind.c_str(), ev->time);
  }
  if (!out.diagnostic.empty()) std::fprintf(stderr, "%s\n", out.diagnostic.c_str());
}

int execute(const eschlab::ExperimentPreset& preset, bool gnuplot) {
  eschlab::RunOptions opts;
  opts.gnuplot = gnuplot;
  try {
    const auto out = eschlab::run_preset(preset, opts);
    print_outcome(preset, out);
    return out.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cahn-Hilliard laboratory on evolving domains"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run an experiment from a key=value config file");
  std::string config_path;
  bool run_gnuplot = false;
  run_cmd->add_option("config", config_path, "configuration file")->required();
  run_cmd->add_flag("--gnuplot", run_gnuplot, "also write a gnuplot script");

  auto* preset_cmd = app.add_subcommand("preset", "run a built-in preset");
  std::string preset_name;
  std::vector<double> eps;
  std::string out_dir;
  bool gnuplot = false;
  bool print_config = false;
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  preset_cmd->add_option("--epsilon", eps, "interface widths (replaces the preset list)")->delimiter(',');
  preset_cmd->add_option("--out", out_dir, "output directory");
  preset_cmd->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");
  preset_cmd->add_flag("--print-config", print_config, "print the preset as a config file and exit");

  auto* const_cmd = app.add_subcommand("constants", "print the calibration constants S and T");
  std::string potential = "quartic";
  const_cmd->add_option("--potential", potential, "quartic or log")
      ->check(CLI::IsMember({"quartic", "log"}));

  auto* list_cmd = app.add_subcommand("list", "list the built-in presets");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) {
    std::ifstream f(config_path);
    if (!f) {
      std::fprintf(stderr, "error: cannot read %s\n", config_path.c_str());
      return 1;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    eschlab::ExperimentPreset preset;
    try {
      preset = eschlab::parse_config(ss.str());
    } catch (const eschlab::ConfigError& e) {
      std::fprintf(stderr, "%s: %s\n", config_path.c_str(), e.what());
      return 1;
    }
    return execute(preset, run_gnuplot);
  }

  if (*preset_cmd) {
    eschlab::ExperimentPreset preset;
    try {
      preset = eschlab::builtin_preset(preset_name);
    } catch (const eschlab::ConfigError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
    if (!eps.empty()) {
      for (double e : eps) {
        if (!(e > 0.0)) {
          std::fprintf(stderr, "error: epsilon must be positive\n");
          return 1;
        }
      }
      preset.epsilon_list = eps;
      preset.params.epsilon = eps.front();
    }
    preset.out_dir = out_dir.empty() ? "out/" + preset.name : out_dir;
    if (print_config) {
      std::fputs(eschlab::render_config(preset).c_str(), stdout);
      return 0;
    }
    return execute(preset, gnuplot);
  }

  if (*const_cmd) {
    const auto params = potential == "log" ? eschlab::logarithmic_params() : eschlab::quartic_params();
    try {
      const auto profile = eschlab::solve_profile(params);
      std::printf("potential=%s u_a=%.12g u_b=%.12g\n", std::string(eschlab::to_string(params.potential)).c_str(),
                  params.u_a, params.u_b);
      std::printf("S=%.12g\n", eschlab::surface_tension_constant(profile, params));
      std::printf("T=%.12g\n", eschlab::correction_constant(profile, params));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
    return 0;
  }

  if (*list_cmd) {
    for (const auto& n : eschlab::preset_names()) std::printf("%s\n", n.c_str());
  }
  return 0;
}
