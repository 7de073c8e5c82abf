#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cvmdi/keyrate.hpp"

namespace cvmdi {

/// Box constraints of the state-parameter search.
struct OptBox {
  double V_lo = 1.0, V_hi = 15.0;
  double d_lo = 0.0, d_hi = 5.0;
  double Ts_lo = 0.0, Ts_hi = 1.0;

  void validate() const;  // throws std::invalid_argument
};

enum class BoundarySide { Interior, Lower, Upper };

struct OptResult {
  StateSpec best;
  double best_K = 0.0;
  long evaluations = 0;
  /// Per-dimension flags in (V, d, Ts) order; inactive dimensions report
  /// Interior.
  std::array<BoundarySide, 3> at_boundary{BoundarySide::Interior,
                                          BoundarySide::Interior,
                                          BoundarySide::Interior};
  bool no_positive_key = false;
};

struct OptOptions {
  int threads = 1;
  int grid_V = 15;
  int grid_d = 11;
  int grid_Ts = 21;  // densified toward the upper end
  int nm_max_iter = 120;
  double nm_ftol = 1e-10;
  EvalOptions eval;
  std::optional<StateSpec> warm_start;  // extra simplex seed
};

/// Two-stage box-constrained maximization of K: coarse deterministic grid
/// (Ts sampled densely near 1 where heralded optima sit), then simplex
/// descent from the best three grid points. Dimensions the family does not
/// use are dropped. Ties within 1e-12 in K break toward smaller V, then
/// smaller d, then larger Ts.
OptResult optimize_key_rate(StateFamily family, const LinkBudget& link,
                            const OptBox& box = {}, const GainSpec& gain = {},
                            const OptOptions& opts = {});

struct ScanPoint {
  double V = 0.0;
  double K = 0.0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  int argmax_index = -1;
  bool argmax_interior = false;
};

/// K over a variance grid at fixed d, Ts.
ScanResult scan_variance(StateFamily family, const LinkBudget& link,
                         const std::vector<double>& V_grid, double d,
                         double Ts, const GainSpec& gain = {},
                         const OptOptions& opts = {});

/// Largest L_AC with optimized K >= K_target, bracketing plus bisection to
/// 0.01 km; eps_A follows the linear fit as L varies. Throws NoBracketError
/// when even L = 0 misses the target.
double max_distance(StateFamily family, const LinkBudget& link_template,
                    double K_target, const OptBox& box = {},
                    const GainSpec& gain = {}, const OptOptions& opts = {});

/// Same with all state parameters pinned.
double max_distance_fixed(const StateSpec& spec,
                          const LinkBudget& link_template, double K_target,
                          const GainSpec& gain = {},
                          const OptOptions& opts = {});

struct FrontierPoint {
  double V = 0.0;
  std::optional<double> L_max;  // absent when no positive bracket exists
};

/// Per-variance maximum distance at fixed (d, Ts) — or with the remaining
/// dimensions optimized when optimize_others is set.
std::vector<FrontierPoint> frontier(StateFamily family,
                                    const std::vector<double>& V_grid,
                                    double K_target,
                                    const LinkBudget& link_template,
                                    double fixed_d, double fixed_Ts,
                                    bool optimize_others = false,
                                    const GainSpec& gain = {},
                                    const OptOptions& opts = {});

struct TracePoint {
  double L = 0.0;
  StateSpec best;
  double K = 0.0;
};

/// optimize_key_rate per distance, warm-started along the grid.
std::vector<TracePoint> optimal_parameter_trace(
    StateFamily family, const std::vector<double>& L_grid,
    const LinkBudget& link_template, const OptBox& box = {},
    const GainSpec& gain = {}, const OptOptions& opts = {});

/// Deterministic stage-1 grids (exposed for tests and figure drivers).
std::vector<double> linear_grid(double lo, double hi, int n);
std::vector<double> ts_search_grid(double lo, double hi, int n);

}  // namespace cvmdi
