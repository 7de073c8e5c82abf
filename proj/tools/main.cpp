#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvmdi/errors.hpp"
#include "cvmdi/figures.hpp"
#include "cvmdi/keyrate.hpp"
#include "cvmdi/run_config.hpp"
#include "cvmdi/selfcheck.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitSelfcheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPhysics = 3;

struct FlagOverrides {
  std::optional<std::string> family, out, format, gain_mode, config;
  std::optional<double> V, d, Ts, L, Lbc, beta, gain_g, K_target, cutoff_tol;
  std::optional<int> threads;
  bool skip_bad_points = false;
  bool cutoff_search = false;
};

void add_common_flags(CLI::App* cmd, FlagOverrides& flags) {
  cmd->add_option("--family", flags.family,
                  "State family: tmsv, sps-tmsv, tmsc, sps-tmsc");
  cmd->add_option("--V", flags.V, "Quadrature variance (shot-noise units)");
  cmd->add_option("--d", flags.d, "Displacement parameter");
  cmd->add_option("--Ts", flags.Ts, "SPS beamsplitter transmissivity");
  cmd->add_option("--L", flags.L, "Alice-relay distance L_AC in km");
  cmd->add_option("--Lbc", flags.Lbc, "Bob-relay distance L_BC in km");
  cmd->add_option("--beta", flags.beta, "Reconciliation efficiency");
  cmd->add_option("--gain-mode", flags.gain_mode,
                  "Displacement gain: li-optimal, fixed, numeric");
  cmd->add_option("--gain-g", flags.gain_g, "Gain value for --gain-mode fixed");
  cmd->add_option("--K-target", flags.K_target,
                  "Target key rate for distance frontiers");
  cmd->add_option("--cutoff-tol", flags.cutoff_tol,
                  "Fock cutoff stability tolerance");
  cmd->add_flag("--cutoff-search", flags.cutoff_search,
                "Resolve cutoffs by stability search instead of the seed rule");
  cmd->add_option("--config", flags.config,
                  "JSON config file (fallback: CVMDI_CONFIG)");
  cmd->add_option("--out", flags.out, "Output path (default stdout)");
  cmd->add_option("--format", flags.format, "Output format: csv or json");
  cmd->add_flag("--skip-bad-points", flags.skip_bad_points,
                "Skip sweep points that fail with a physics error");
  cmd->add_option("--threads", flags.threads, "Worker threads for sweeps");
}

cvmdi::RunConfig resolve_config(const FlagOverrides& flags) {
  cvmdi::RunConfig cfg;
  std::string config_path;
  if (flags.config) {
    config_path = *flags.config;
  } else if (const char* env = std::getenv("CVMDI_CONFIG")) {
    config_path = env;
  }
  if (!config_path.empty()) {
    cfg = cvmdi::load_config_file(config_path, std::move(cfg));
  }
  if (flags.family) cfg.family = cvmdi::family_from_string(*flags.family);
  if (flags.V) cfg.V = *flags.V;
  if (flags.d) cfg.d = *flags.d;
  if (flags.Ts) cfg.Ts = *flags.Ts;
  if (flags.L) cfg.link.L_AC_km = *flags.L;
  if (flags.Lbc) cfg.link.L_BC_km = *flags.Lbc;
  if (flags.beta) cfg.link.beta = *flags.beta;
  if (flags.gain_mode) cfg.gain.mode = cvmdi::gain_mode_from_string(*flags.gain_mode);
  if (flags.gain_g) cfg.gain.g = *flags.gain_g;
  if (flags.K_target) cfg.K_target = *flags.K_target;
  if (flags.cutoff_tol) cfg.cutoff_tol = *flags.cutoff_tol;
  if (flags.cutoff_search) cfg.cutoff_search = true;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.skip_bad_points) cfg.skip_bad_points = true;
  if (flags.out) cfg.out = *flags.out;
  if (flags.format) cfg.format = *flags.format;
  cfg.validate();
  return cfg;
}

void emit(const cvmdi::RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw cvmdi::ConfigError("cannot write output file " + cfg.out);
  out << text;
}

json matrix_json(const Eigen::Matrix4d& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

double spec_default_ts(cvmdi::StateFamily family) {
  return cvmdi::family_has_sps(family) ? 0.99 : 0.0;
}

int cmd_keyrate(const FlagOverrides& flags) {
  const cvmdi::RunConfig cfg = resolve_config(flags);
  cvmdi::StateSpec spec{cfg.family, cfg.V.value_or(6.0), cfg.d.value_or(0.0),
                        cfg.Ts.value_or(spec_default_ts(cfg.family))};
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw cvmdi::ConfigError(e.what());
  }
  const cvmdi::KeyRateBreakdown r =
      cvmdi::secret_key_rate(spec, cfg.link, cfg.gain, cfg.eval_options());
  json j;
  j["family"] = cvmdi::to_string(spec.family);
  j["V"] = spec.V;
  j["d"] = spec.d;
  if (spec.has_sps()) j["Ts"] = spec.Ts;
  j["L_AC_km"] = cfg.link.L_AC_km;
  j["P_SPS"] = r.p_sps;
  j["I_AB_bits"] = r.I_AB;
  j["chi_BE_bits"] = r.chi_BE;
  j["K_bits_per_use"] = r.K;
  j["nu"] = {r.nu1, r.nu2, r.nu3};
  j["channel"] = {{"T", r.channel.T},
                  {"eps_th", r.channel.eps_th},
                  {"chi_ch", r.channel.chi_ch},
                  {"gain", r.channel.gain}};
  j["cov_source"] = matrix_json(r.cov_source.m);
  j["cov_after"] = matrix_json(r.cov_after.m);
  emit(cfg, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_figure(const std::string& name, const FlagOverrides& flags) {
  const cvmdi::RunConfig cfg = resolve_config(flags);
  const cvmdi::FigureTable table = cvmdi::make_figure(name, cfg);
  emit(cfg, cfg.format == "json" ? cvmdi::render_json(table)
                                 : cvmdi::render_csv(table));
  return kExitOk;
}

int cmd_selfcheck(bool verbose, const std::string& fixtures) {
  const auto results = cvmdi::run_selfchecks(fixtures);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (verbose) std::cout << " (" << r.millis << " ms)";
    if (!r.pass) std::cout << ": " << r.detail;
    std::cout << "\n";
    all_pass = all_pass && r.pass;
  }
  std::cout << (all_pass ? "selfcheck ok" : "selfcheck FAILED") << "\n";
  return all_pass ? kExitOk : kExitSelfcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CV-MDI-QKD key-rate calculator and figure driver"};
  app.require_subcommand(1);

  FlagOverrides keyrate_flags;
  CLI::App* keyrate = app.add_subcommand(
      "keyrate", "Evaluate one key-rate point, JSON to stdout");
  add_common_flags(keyrate, keyrate_flags);

  FlagOverrides figure_flags;
  std::string figure_name;
  CLI::App* figure =
      app.add_subcommand("figure", "Produce a figure-ready CSV/JSON table");
  figure->add_option("name", figure_name, "fig2, fig3, fig4 or fig5")
      ->required();
  add_common_flags(figure, figure_flags);

  bool verbose = false;
  std::string fixtures;
  CLI::App* selfcheck =
      app.add_subcommand("selfcheck", "Run the fast invariant suite");
  selfcheck->add_flag("--verbose", verbose, "Print per-check timings");
  selfcheck->add_option("--fixtures", fixtures, "Fixture directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (keyrate->parsed()) return cmd_keyrate(keyrate_flags);
    if (figure->parsed()) return cmd_figure(figure_name, figure_flags);
    if (selfcheck->parsed()) return cmd_selfcheck(verbose, fixtures);
  } catch (const cvmdi::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cvmdi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPhysics;
  }
  return kExitUsage;
}
