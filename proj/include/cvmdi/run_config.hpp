#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvmdi/channel.hpp"
#include "cvmdi/optimize.hpp"
#include "cvmdi/state.hpp"

namespace cvmdi {

/// Resolved run configuration. Precedence: built-in defaults, then a JSON
/// config file (--config / CVMDI_CONFIG), then command-line flags.
struct RunConfig {
  std::string scenario;
  StateFamily family = StateFamily::Tmsv;
  // Unset state parameters fall back to per-command defaults (keyrate:
  // V=6, d=0, Ts=0.99; fig5 fixes d=2, Ts=0.9 unless overridden).
  std::optional<double> V, d, Ts;
  LinkBudget link;
  OptBox box;
  std::string out;             // empty: stdout
  std::string format = "csv";  // csv | json
  double cutoff_tol = 1e-8;
  bool cutoff_search = false;
  GainSpec gain;
  double K_target = 1e-3;
  int threads = 1;
  bool skip_bad_points = false;
  std::vector<double> L_grid;  // figure-specific defaults when empty
  std::vector<double> V_grid;

  EvalOptions eval_options() const;
  OptOptions opt_options() const;

  void validate() const;  // throws ConfigError
};

/// Parse a JSON config file. Unknown keys anywhere are rejected.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Parse JSON text (exposed for tests).
RunConfig parse_config_json(const std::string& text, RunConfig base = {});

/// Compact single-line JSON of the physics-relevant resolved settings,
/// embedded in figure provenance headers. Excludes execution details
/// (threads, output paths) so reruns produce identical bytes.
std::string describe_physics_config(const RunConfig& cfg);

std::string to_string(GainMode mode);
GainMode gain_mode_from_string(const std::string& s);

}  // namespace cvmdi
