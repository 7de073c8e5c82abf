#include "cvmdi/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cvmdi/errors.hpp"
#include "cvmdi/keyrate.hpp"
#include "cvmdi/parallel.hpp"

namespace cvmdi {

namespace {

const std::vector<StateFamily> kFamilies = {
    StateFamily::Tmsv, StateFamily::SpsTmsv, StateFamily::SpsTmsc};

std::vector<double> default_fig2_L() { return {40.0, 80.0, 120.0, 160.0}; }

std::vector<double> default_fig2_V() {
  std::vector<double> v;
  for (double x = 1.0; x <= 15.0 + 1e-9; x += 0.5) v.push_back(x);
  return v;
}

std::vector<double> default_L_grid() {
  std::vector<double> l;
  for (double x = 10.0; x <= 180.0 + 1e-9; x += 10.0) l.push_back(x);
  return l;
}

std::vector<double> default_fig5_V() {
  std::vector<double> v;
  for (double x = 2.0; x <= 50.0 + 1e-9; x += 2.0) v.push_back(x);
  return v;
}

std::string grid_comment(const std::string& label,
                         const std::vector<double>& grid) {
  std::ostringstream out;
  out << "# " << label << ":";
  for (double v : grid) out << ' ' << format_value(v);
  return out.str();
}

void sort_rows(FigureTable& table) {
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const auto& a, const auto& b) {
                     for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
                       if (a[i].is_text != b[i].is_text) return a[i].is_text;
                       if (a[i].is_text) {
                         if (a[i].text != b[i].text) return a[i].text < b[i].text;
                       } else if (a[i].num != b[i].num) {
                         return a[i].num < b[i].num;
                       }
                     }
                     return false;
                   });
}

FigureTable fig2(const RunConfig& cfg) {
  FigureTable table;
  table.name = "fig2";
  table.columns = {"L_AC_km", "V", "K"};
  const std::vector<double> l_grid =
      cfg.L_grid.empty() ? default_fig2_L() : cfg.L_grid;
  const std::vector<double> v_grid =
      cfg.V_grid.empty() ? default_fig2_V() : cfg.V_grid;
  if (v_grid.empty() || l_grid.empty()) {
    throw ConfigError("fig2: empty grid");
  }
  table.provenance.push_back(grid_comment("L_grid_km", l_grid));
  table.provenance.push_back(grid_comment("V_grid", v_grid));

  struct Point {
    double L, V, K;
    bool ok = false;
  };
  std::vector<Point> points(l_grid.size() * v_grid.size());
  const EvalOptions eval = cfg.eval_options();
  parallel_for_index(points.size(), cfg.threads, [&](std::size_t i) {
    const double L = l_grid[i / v_grid.size()];
    const double V = v_grid[i % v_grid.size()];
    LinkBudget link = cfg.link;
    link.L_AC_km = L;
    Point& p = points[i];
    p.L = L;
    p.V = V;
    try {
      p.K = secret_key_rate({StateFamily::Tmsv, V, 0.0, 0.0}, link, cfg.gain,
                            eval)
                .K;
      p.ok = true;
    } catch (const Error&) {
      if (!cfg.skip_bad_points) throw;
      std::cerr << "fig2: skipping point L=" << L << " V=" << V << "\n";
    }
  });
  for (const Point& p : points) {
    if (!p.ok) continue;
    table.rows.push_back(
        {FigureCell::of(p.L), FigureCell::of(p.V), FigureCell::of(p.K)});
  }
  return table;
}

FigureTable fig3(const RunConfig& cfg) {
  FigureTable table;
  table.name = "fig3";
  table.columns = {"family", "L_AC_km", "K_opt"};
  const std::vector<double> l_grid =
      cfg.L_grid.empty() ? default_L_grid() : cfg.L_grid;
  if (l_grid.empty()) throw ConfigError("fig3: empty L grid");
  table.provenance.push_back(grid_comment("L_grid_km", l_grid));

  OptOptions opts = cfg.opt_options();
  for (StateFamily family : kFamilies) {
    opts.warm_start.reset();
    for (double L : l_grid) {
      LinkBudget link = cfg.link;
      link.L_AC_km = L;
      try {
        const OptResult r =
            optimize_key_rate(family, link, cfg.box, cfg.gain, opts);
        opts.warm_start = r.best;
        table.rows.push_back({FigureCell::of(to_string(family)),
                              FigureCell::of(L), FigureCell::of(r.best_K)});
      } catch (const Error&) {
        if (!cfg.skip_bad_points) throw;
        std::cerr << "fig3: skipping point family=" << to_string(family)
                  << " L=" << L << "\n";
      }
    }
  }
  sort_rows(table);
  return table;
}

FigureTable fig4(const RunConfig& cfg) {
  FigureTable table;
  table.name = "fig4";
  table.columns = {"family", "L_AC_km", "V_opt", "d_opt", "Ts_opt"};
  const std::vector<double> l_grid =
      cfg.L_grid.empty() ? default_L_grid() : cfg.L_grid;
  if (l_grid.empty()) throw ConfigError("fig4: empty L grid");
  table.provenance.push_back(grid_comment("L_grid_km", l_grid));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (StateFamily family : kFamilies) {
    try {
      const auto trace = optimal_parameter_trace(family, l_grid, cfg.link,
                                                 cfg.box, cfg.gain,
                                                 cfg.opt_options());
      for (const TracePoint& p : trace) {
        table.rows.push_back(
            {FigureCell::of(to_string(family)), FigureCell::of(p.L),
             FigureCell::of(p.best.V),
             FigureCell::of(family_has_displacement(family) ? p.best.d : 0.0),
             FigureCell::of(family_has_sps(family) ? p.best.Ts : nan)});
      }
    } catch (const Error&) {
      if (!cfg.skip_bad_points) throw;
      std::cerr << "fig4: skipping family " << to_string(family) << "\n";
    }
  }
  sort_rows(table);
  return table;
}

FigureTable fig5(const RunConfig& cfg) {
  FigureTable table;
  table.name = "fig5";
  table.columns = {"family", "V", "L_max_km"};
  const std::vector<double> v_grid =
      cfg.V_grid.empty() ? default_fig5_V() : cfg.V_grid;
  if (v_grid.empty()) throw ConfigError("fig5: empty V grid");
  const double fixed_d = cfg.d.value_or(2.0);
  const double fixed_ts = cfg.Ts.value_or(0.9);
  table.provenance.push_back(grid_comment("V_grid", v_grid));
  table.provenance.push_back("# fixed: d=" + format_value(fixed_d) +
                             " Ts=" + format_value(fixed_ts) +
                             " K_target=" + format_value(cfg.K_target));

  for (StateFamily family : kFamilies) {
    const auto points = frontier(family, v_grid, cfg.K_target, cfg.link,
                                 fixed_d, fixed_ts, false, cfg.gain,
                                 cfg.opt_options());
    for (const FrontierPoint& p : points) {
      if (!p.L_max) continue;  // no positive bracket: row absent
      table.rows.push_back({FigureCell::of(to_string(family)),
                            FigureCell::of(p.V), FigureCell::of(*p.L_max)});
    }
  }
  sort_rows(table);
  return table;
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

FigureTable make_figure(const std::string& name, const RunConfig& cfg) {
  cfg.validate();
  FigureTable table;
  if (name == "fig2") {
    table = fig2(cfg);
  } else if (name == "fig3") {
    table = fig3(cfg);
  } else if (name == "fig4") {
    table = fig4(cfg);
  } else if (name == "fig5") {
    table = fig5(cfg);
  } else {
    throw ConfigError("unknown figure '" + name +
                      "' (expected fig2, fig3, fig4, fig5)");
  }
  table.provenance.insert(table.provenance.begin(),
                          {"# cvmdi figure " + table.name,
                           "# config: " + describe_physics_config(cfg)});
  return table;
}

std::string render_csv(const FigureTable& table) {
  std::ostringstream out;
  for (const std::string& line : table.provenance) out << line << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << (row[i].is_text ? row[i].text : format_value(row[i].num));
    }
    out << '\n';
  }
  return out.str();
}

std::string render_json(const FigureTable& table) {
  nlohmann::json j;
  j["figure"] = table.name;
  j["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& cell : row) {
      if (cell.is_text) {
        r.push_back(cell.text);
      } else if (std::isnan(cell.num)) {
        r.push_back(nullptr);
      } else {
        r.push_back(cell.num);
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace cvmdi
