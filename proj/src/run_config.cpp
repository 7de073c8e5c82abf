#include "cvmdi/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cvmdi/errors.hpp"

namespace cvmdi {

using nlohmann::json;

std::string to_string(GainMode mode) {
  switch (mode) {
    case GainMode::LiOptimal: return "li-optimal";
    case GainMode::Fixed: return "fixed";
    case GainMode::Numeric: return "numeric";
  }
  throw std::invalid_argument("unknown GainMode");
}

GainMode gain_mode_from_string(const std::string& s) {
  if (s == "li-optimal") return GainMode::LiOptimal;
  if (s == "fixed") return GainMode::Fixed;
  if (s == "numeric") return GainMode::Numeric;
  throw ConfigError("unknown gain mode '" + s +
                    "' (expected li-optimal, fixed, numeric)");
}

EvalOptions RunConfig::eval_options() const {
  EvalOptions opts;
  opts.cutoff_tol = cutoff_tol;
  opts.cutoff_search = cutoff_search;
  return opts;
}

OptOptions RunConfig::opt_options() const {
  OptOptions opts;
  opts.threads = threads;
  opts.eval = eval_options();
  return opts;
}

void RunConfig::validate() const {
  try {
    link.validate();
    box.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (V && !(*V >= 1.0)) throw ConfigError("V must be >= 1");
  if (d && !(*d >= 0.0)) throw ConfigError("d must be >= 0");
  if (Ts && !(*Ts >= 0.0 && *Ts <= 1.0)) {
    throw ConfigError("Ts must lie in [0, 1]");
  }
  if (format != "csv" && format != "json") {
    throw ConfigError("format must be csv or json, got '" + format + "'");
  }
  if (!(cutoff_tol > 0.0)) throw ConfigError("cutoff_tol must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(K_target >= 0.0)) throw ConfigError("K_target must be >= 0");
  if (gain.mode == GainMode::Fixed && !(gain.g > 0.0)) {
    throw ConfigError("gain mode 'fixed' requires a positive g");
  }
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError("unknown config key '" + where + it.key() + "'");
    }
  }
}

double number_at(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw ConfigError("config key '" + key + "' must be a number");
  }
  return obj[key].get<double>();
}

std::vector<double> grid_at(const json& obj, const std::string& key) {
  if (!obj[key].is_array()) {
    throw ConfigError("config key '" + key + "' must be an array of numbers");
  }
  std::vector<double> grid;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) {
      throw ConfigError("config key '" + key + "' must contain numbers only");
    }
    grid.push_back(v.get<double>());
  }
  return grid;
}

}  // namespace

namespace {

RunConfig parse_config_object(const json& root, RunConfig base);

}  // namespace

RunConfig parse_config_json(const std::string& text, RunConfig base) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  try {
    return parse_config_object(root, std::move(base));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value type: ") + e.what());
  }
}

namespace {

RunConfig parse_config_object(const json& root, RunConfig base) {

  reject_unknown(root,
                 {"scenario", "family", "V", "d", "Ts", "link", "box", "out",
                  "format", "cutoff_tol", "cutoff_search", "gain", "K_target",
                  "threads", "skip_bad_points", "L_grid", "V_grid"},
                 "");

  RunConfig cfg = std::move(base);
  if (root.contains("scenario")) cfg.scenario = root["scenario"].get<std::string>();
  if (root.contains("family")) {
    try {
      cfg.family = family_from_string(root["family"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (root.contains("V")) cfg.V = number_at(root, "V", 0.0);
  if (root.contains("d")) cfg.d = number_at(root, "d", 0.0);
  if (root.contains("Ts")) cfg.Ts = number_at(root, "Ts", 0.0);
  if (root.contains("link")) {
    const json& link = root["link"];
    reject_unknown(link,
                   {"L_AC_km", "L_BC_km", "w_db_per_km", "eps_a0", "eps_a1",
                    "T_B", "eps_B", "beta"},
                   "link.");
    cfg.link.L_AC_km = number_at(link, "L_AC_km", cfg.link.L_AC_km);
    cfg.link.L_BC_km = number_at(link, "L_BC_km", cfg.link.L_BC_km);
    cfg.link.w_db_per_km = number_at(link, "w_db_per_km", cfg.link.w_db_per_km);
    cfg.link.eps_a0 = number_at(link, "eps_a0", cfg.link.eps_a0);
    cfg.link.eps_a1 = number_at(link, "eps_a1", cfg.link.eps_a1);
    cfg.link.T_B = number_at(link, "T_B", cfg.link.T_B);
    cfg.link.eps_B = number_at(link, "eps_B", cfg.link.eps_B);
    cfg.link.beta = number_at(link, "beta", cfg.link.beta);
  }
  if (root.contains("box")) {
    const json& box = root["box"];
    reject_unknown(box, {"V", "d", "Ts"}, "box.");
    auto bounds = [&](const char* key, double& lo, double& hi) {
      if (!box.contains(key)) return;
      if (!box[key].is_array() || box[key].size() != 2) {
        throw ConfigError(std::string("box.") + key +
                          " must be a [lo, hi] pair");
      }
      lo = box[key][0].get<double>();
      hi = box[key][1].get<double>();
    };
    bounds("V", cfg.box.V_lo, cfg.box.V_hi);
    bounds("d", cfg.box.d_lo, cfg.box.d_hi);
    bounds("Ts", cfg.box.Ts_lo, cfg.box.Ts_hi);
  }
  if (root.contains("out")) cfg.out = root["out"].get<std::string>();
  if (root.contains("format")) cfg.format = root["format"].get<std::string>();
  cfg.cutoff_tol = number_at(root, "cutoff_tol", cfg.cutoff_tol);
  if (root.contains("cutoff_search")) {
    cfg.cutoff_search = root["cutoff_search"].get<bool>();
  }
  if (root.contains("gain")) {
    const json& gain = root["gain"];
    reject_unknown(gain, {"mode", "g"}, "gain.");
    if (gain.contains("mode")) {
      cfg.gain.mode = gain_mode_from_string(gain["mode"].get<std::string>());
    }
    cfg.gain.g = number_at(gain, "g", cfg.gain.g);
  }
  cfg.K_target = number_at(root, "K_target", cfg.K_target);
  if (root.contains("threads")) cfg.threads = root["threads"].get<int>();
  if (root.contains("skip_bad_points")) {
    cfg.skip_bad_points = root["skip_bad_points"].get<bool>();
  }
  if (root.contains("L_grid")) cfg.L_grid = grid_at(root, "L_grid");
  if (root.contains("V_grid")) cfg.V_grid = grid_at(root, "V_grid");

  cfg.validate();
  return cfg;
}

}  // namespace

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str(), std::move(base));
}

std::string describe_physics_config(const RunConfig& cfg) {
  json j;
  if (!cfg.scenario.empty()) j["scenario"] = cfg.scenario;
  j["link"] = {{"w_db_per_km", cfg.link.w_db_per_km},
               {"eps_a0", cfg.link.eps_a0},
               {"eps_a1", cfg.link.eps_a1},
               {"T_B", cfg.link.T_B},
               {"eps_B", cfg.link.eps_B},
               {"beta", cfg.link.beta},
               {"L_BC_km", cfg.link.L_BC_km}};
  j["box"] = {{"V", {cfg.box.V_lo, cfg.box.V_hi}},
              {"d", {cfg.box.d_lo, cfg.box.d_hi}},
              {"Ts", {cfg.box.Ts_lo, cfg.box.Ts_hi}}};
  j["gain"] = to_string(cfg.gain.mode);
  if (cfg.gain.mode == GainMode::Fixed) j["gain_g"] = cfg.gain.g;
  j["cutoff_tol"] = cfg.cutoff_tol;
  j["K_target"] = cfg.K_target;
  return j.dump();
}

}  // namespace cvmdi
