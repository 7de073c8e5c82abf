#pragma once

#include <string>
#include <vector>

#include "cvmdi/run_config.hpp"

namespace cvmdi {

struct FigureCell {
  bool is_text = false;
  std::string text;
  double num = 0.0;

  static FigureCell of(double v) { return FigureCell{false, {}, v}; }
  static FigureCell of(std::string s) {
    return FigureCell{true, std::move(s), 0.0};
  }
};

struct FigureTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<FigureCell>> rows;   // sorted by leading columns
  std::vector<std::string> provenance;         // '#'-prefixed comment lines
};

/// name is one of fig2, fig3, fig4, fig5:
///   fig2 (L_AC_km, V, K)                    key rate vs variance, tmsv
///   fig3 (family, L_AC_km, K_opt)           optimized rate vs distance
///   fig4 (family, L_AC_km, V_opt, d_opt, Ts_opt)  optimal parameters
///   fig5 (family, V, L_max_km)              distance frontier at fixed d, Ts
FigureTable make_figure(const std::string& name, const RunConfig& cfg);

std::string render_csv(const FigureTable& table);
std::string render_json(const FigureTable& table);

/// 10-significant-digit formatting shared by every emitter.
std::string format_value(double v);

}  // namespace cvmdi
