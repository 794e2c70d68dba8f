// esd: concurrence sweeps for two atoms in separate vacuum cavities.

#include "esd/errors.hpp"
#include "esd/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct RunOptions {
  std::string config_path;
  // flag values kept as text and routed through the same parser as the file
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_override(CLI::App& cmd, RunOptions& opts, const std::string& flag, const std::string& key,
                  const std::string& help) {
  cmd.add_option_function<std::string>(
      flag, [&opts, key](const std::string& v) { opts.overrides.emplace_back(key, v); }, help);
}

int write_result(const esd::ScenarioConfig& config, const esd::ScenarioResult& result) {
  if (config.output.empty()) {
    esd::write_csv(std::cout, result.records);
    if (config.compare) {
      std::cout << '\n';
      esd::write_joined_csv(std::cout, config, result.joined);
    }
  } else {
    std::ofstream out(config.output);
    if (!out) throw esd::ValidationError("out: cannot write '" + config.output + "'");
    esd::write_csv(out, result.records);
    if (config.compare) {
      std::ofstream joined(config.output + ".joined.csv");
      esd::write_joined_csv(joined, config, result.joined);
    }
  }
  esd::write_summary(std::cerr, config, result.summary);
  if (result.summary.error_count > 0) {
    std::cerr << "esd: " << result.summary.error_count << " grid point(s) failed numerically\n";
    for (const auto& rec : result.records)
      if (!rec.error.empty()) {
        std::cerr << "esd: first failure at beta_sq=" << rec.beta_sq << " gt=" << rec.gt << ": " << rec.error
                  << '\n';
        break;
      }
    return kExitNumerical;
  }
  return 0;
}

int cmd_run(const RunOptions& opts) {
  esd::ScenarioConfig config = opts.config_path.empty() ? esd::ScenarioConfig{} : esd::load_config_file(opts.config_path);
  // omega0 first so --delta keeps its meaning relative to the final omega0
  for (const auto& [key, value] : opts.overrides)
    if (key == "omega0") esd::apply_setting(config, key, value);
  for (const auto& [key, value] : opts.overrides)
    if (key != "omega0") esd::apply_setting(config, key, value);
  const auto result = esd::run_scenario(config);
  return write_result(config, result);
}

int cmd_figure(const std::string& id_text, const std::string& out, bool text_values) {
  const esd::FigureId id = esd::parse_figure_id(id_text);
  const auto fig = esd::reproduce_figure(id, out, text_values);
  if (out.empty()) esd::write_csv(std::cout, fig.result.records);
  std::cerr << "figure " << esd::to_string(id) << ": " << fig.scenario.caption << '\n';
  if (!fig.scenario.notes.empty()) std::cerr << "note: " << fig.scenario.notes << '\n';
  esd::write_summary(std::cerr, fig.config, fig.result.summary);
  return fig.result.summary.error_count > 0 ? kExitNumerical : 0;
}

int cmd_check() {
  const auto checks = esd::run_cross_validation();
  bool all = true;
  std::cout << std::left << std::setw(56) << "check" << std::setw(14) << "measured" << std::setw(12) << "tolerance"
            << "result\n";
  for (const auto& c : checks) {
    char measured[32], tol[32];
    std::snprintf(measured, sizeof measured, "%.3e", c.measured);
    std::snprintf(tol, sizeof tol, "%.1e", c.tolerance);
    std::cout << std::setw(56) << c.name << std::setw(14) << measured << std::setw(12) << tol
              << (c.passed ? "PASS" : "FAIL") << '\n';
    all = all && c.passed;
  }
  return all ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement dynamics of two atoms in separate vacuum cavities"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a parameter sweep from a key=value config file and/or flags");
  run->add_option("config", run_opts.config_path, "Config file (key=value, '#' comments)")->check(CLI::ExistingFile);
  add_override(*run, run_opts, "--state", "state", "Initial state: Phi or Psi");
  add_override(*run, run_opts, "--beta-sq", "beta_sq", "beta^2 values: list 'a,b,c' or range 'start:stop:step'");
  add_override(*run, run_opts, "--omega0", "omega0", "Atomic frequency in units of g");
  add_override(*run, run_opts, "--delta", "delta", "Detuning omega0 - omega in units of g");
  add_override(*run, run_opts, "--g", "g", "Coupling strength");
  add_override(*run, run_opts, "--engine", "engine", "tcl_algebraic | tcl_riccati | tcl_direct | rabi | jc_rwa");
  add_override(*run, run_opts, "--compare", "compare", "Second engine for a joined cross-check dataset");
  add_override(*run, run_opts, "--gt-start", "gt_start", "First gt sample");
  add_override(*run, run_opts, "--gt-max", "gt_max", "Last gt sample");
  add_override(*run, run_opts, "--gt-step", "gt_step", "gt spacing");
  add_override(*run, run_opts, "--out", "out", "Output CSV path (default stdout)");
  add_override(*run, run_opts, "--n-cut", "n_cut", "Photon-number cutoff for the rabi engine");
  add_override(*run, run_opts, "--auto-truncation", "auto_truncation", "Double n_cut until converged (true/false)");
  add_override(*run, run_opts, "--phase", "phase", "Relative phase of eta");
  add_override(*run, run_opts, "--revival-threshold", "revival_threshold", "Peak level counted as a revival");
  add_override(*run, run_opts, "--zero-threshold", "zero_threshold", "Level treated as zero concurrence");
  add_override(*run, run_opts, "--threads", "threads", "Worker threads (default ESD_THREADS or all cores)");

  std::string figure_id, figure_out;
  bool text_values = false;
  auto* figure = app.add_subcommand("figure", "Reproduce a figure dataset (Fig1, Fig2a, ..., Fig6)");
  figure->add_option("id", figure_id, "Figure id")->required();
  figure->add_option("--out", figure_out, "Output CSV path; metadata goes to <out>.meta");
  figure->add_flag("--text-values", text_values, "Use the alternative body-text parameters");

  auto* check = app.add_subcommand("check", "Run the oracle cross-validation suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*figure) return cmd_figure(figure_id, figure_out, text_values);
    if (*check) return cmd_check();
  } catch (const esd::ValidationError& e) {
    std::cerr << "esd: error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const esd::NumericalError& e) {
    std::cerr << "esd: numerical failure: " << e.what();
    if (e.time()) std::cerr << " (t=" << *e.time() << ')';
    std::cerr << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "esd: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
