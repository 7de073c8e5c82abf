#include "cvmdi/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>

#include "cvmdi/errors.hpp"
#include "cvmdi/fock.hpp"
#include "cvmdi/parallel.hpp"

namespace cvmdi {

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic preference: higher K, then smaller V, smaller d, larger Ts.
bool better_point(const StateSpec& a, double ka, const StateSpec& b,
                  double kb) {
  if (ka > kb + kTieTol) return true;
  if (kb > ka + kTieTol) return false;
  if (a.V != b.V) return a.V < b.V;
  if (a.d != b.d) return a.d < b.d;
  return a.Ts > b.Ts;
}

struct Objective {
  StateFamily family;
  const LinkBudget& link;
  const GainSpec& gain;
  EvalOptions eval;
  std::atomic<long>* count = nullptr;

  double operator()(double V, double d, double Ts) const {
    if (count) count->fetch_add(1, std::memory_order_relaxed);
    StateSpec spec{family, V, d, Ts};
    try {
      return secret_key_rate(spec, link, gain, eval).K;
    } catch (const PostSelectionError&) {
      return -kInf;  // heralding vanishes: not a usable point
    }
  }
};

struct Dim {
  int index;  // 0 = V, 1 = d, 2 = Ts
  double lo, hi;
};

// Dimensions the family does not use are dropped outright; dimensions the
// box pins to a point are treated as fixed values rather than degenerate
// simplex directions.
std::vector<Dim> active_dims(StateFamily family, const OptBox& box) {
  std::vector<Dim> dims;
  if (box.V_lo < box.V_hi) dims.push_back({0, box.V_lo, box.V_hi});
  if (family_has_displacement(family) && box.d_lo < box.d_hi) {
    dims.push_back({1, box.d_lo, box.d_hi});
  }
  if (family_has_sps(family) && box.Ts_lo < box.Ts_hi) {
    dims.push_back({2, box.Ts_lo, box.Ts_hi});
  }
  return dims;
}

StateSpec assemble(StateFamily family, const OptBox& box,
                   const std::vector<Dim>& dims,
                   const std::vector<double>& x) {
  StateSpec spec{family, box.V_lo,
                 family_has_displacement(family) ? box.d_lo : 0.0,
                 family_has_sps(family) ? box.Ts_lo : 0.0};
  for (std::size_t i = 0; i < dims.size(); ++i) {
    switch (dims[i].index) {
      case 0: spec.V = x[i]; break;
      case 1: spec.d = x[i]; break;
      default: spec.Ts = x[i]; break;
    }
  }
  return spec;
}

struct NmResult {
  std::vector<double> x;
  double K = -kInf;
};

NmResult nelder_mead(const Objective& obj, StateFamily family,
                     const OptBox& box, const std::vector<Dim>& dims,
                     const std::vector<double>& x0, int max_iter,
                     double ftol) {
  const std::size_t k = dims.size();
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < k; ++i) {
      x[i] = std::min(std::max(x[i], dims[i].lo), dims[i].hi);
    }
  };
  auto feval = [&](const std::vector<double>& x) {
    const StateSpec s = assemble(family, box, dims, x);
    return -obj(s.V, s.d, s.Ts);  // minimize
  };
  if (k == 0) {
    const std::vector<double> empty;
    return NmResult{empty, -feval(empty)};
  }

  std::vector<std::vector<double>> xs;
  std::vector<double> fs;
  {
    std::vector<double> x = x0;
    clamp(x);
    xs.push_back(x);
    fs.push_back(feval(x));
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> v = x;
      double h = 0.06 * (dims[j].hi - dims[j].lo);
      if (v[j] + h > dims[j].hi) h = -h;
      v[j] += h;
      clamp(v);
      xs.push_back(v);
      fs.push_back(feval(v));
    }
  }
  const std::size_t nv = xs.size();
  std::vector<std::size_t> order(nv);

  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < nv; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fs[a] < fs[b];
    });
    {
      std::vector<std::vector<double>> xs2(nv);
      std::vector<double> fs2(nv);
      for (std::size_t i = 0; i < nv; ++i) {
        xs2[i] = xs[order[i]];
        fs2[i] = fs[order[i]];
      }
      xs.swap(xs2);
      fs.swap(fs2);
    }
    const double fbest = fs[0], fworst = fs[nv - 1];
    if (std::isfinite(fbest) && std::isfinite(fworst) &&
        std::abs(fworst - fbest) <= ftol * std::max(1.0, std::abs(fbest))) {
      break;
    }

    std::vector<double> centroid(k, 0.0);
    for (std::size_t i = 0; i + 1 < nv; ++i) {
      for (std::size_t j = 0; j < k; ++j) centroid[j] += xs[i][j];
    }
    for (std::size_t j = 0; j < k; ++j) centroid[j] /= double(nv - 1);

    auto blend = [&](double t) {
      std::vector<double> p(k);
      for (std::size_t j = 0; j < k; ++j) {
        p[j] = centroid[j] + t * (centroid[j] - xs[nv - 1][j]);
      }
      clamp(p);
      return p;
    };

    std::vector<double> xr = blend(1.0);
    const double fr = feval(xr);
    if (fr < fs[0]) {
      std::vector<double> xe = blend(2.0);
      const double fe = feval(xe);
      if (fe < fr) {
        xs[nv - 1] = xe;
        fs[nv - 1] = fe;
      } else {
        xs[nv - 1] = xr;
        fs[nv - 1] = fr;
      }
    } else if (fr < fs[nv - 2]) {
      xs[nv - 1] = xr;
      fs[nv - 1] = fr;
    } else {
      const bool outside = fr < fs[nv - 1];
      std::vector<double> xc = blend(outside ? 0.5 : -0.5);
      const double fc = feval(xc);
      if (fc < (outside ? fr : fs[nv - 1])) {
        xs[nv - 1] = xc;
        fs[nv - 1] = fc;
      } else {
        for (std::size_t i = 1; i < nv; ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
          }
          clamp(xs[i]);
          fs[i] = feval(xs[i]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < nv; ++i) {
    if (fs[i] < fs[best]) best = i;
  }
  return NmResult{xs[best], -fs[best]};
}

}  // namespace

void OptBox::validate() const {
  if (!(V_lo <= V_hi) || !(d_lo <= d_hi) || !(Ts_lo <= Ts_hi)) {
    throw std::invalid_argument("OptBox: lo must not exceed hi");
  }
  if (!(V_lo >= 1.0)) throw std::invalid_argument("OptBox: V_lo must be >= 1");
  if (!(d_lo >= 0.0)) throw std::invalid_argument("OptBox: d_lo must be >= 0");
  if (!(Ts_lo >= 0.0 && Ts_hi <= 1.0)) {
    throw std::invalid_argument("OptBox: Ts bounds must lie in [0, 1]");
  }
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g;
  if (n <= 1 || lo == hi) {
    g.push_back(lo);
    return g;
  }
  g.reserve(n);
  for (int i = 0; i < n; ++i) {
    g.push_back(lo + (hi - lo) * double(i) / double(n - 1));
  }
  return g;
}

std::vector<double> ts_search_grid(double lo, double hi, int n) {
  // Optima sit just below Ts = 1; sample that shoulder densely.
  static constexpr double kDense[] = {0.90,  0.92, 0.94,  0.96, 0.975,
                                      0.985, 0.99, 0.995, 0.999};
  const int n_dense = static_cast<int>(std::size(kDense));
  std::vector<double> fractions;
  if (n <= n_dense + 2) {
    fractions = linear_grid(0.0, 0.999, std::max(2, n));
  } else {
    fractions = linear_grid(0.0, 0.88, n - n_dense);
    fractions.insert(fractions.end(), std::begin(kDense), std::end(kDense));
  }
  std::vector<double> g;
  g.reserve(fractions.size());
  for (double f : fractions) g.push_back(lo + f * (hi - lo));
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

OptResult optimize_key_rate(StateFamily family, const LinkBudget& link,
                            const OptBox& box, const GainSpec& gain,
                            const OptOptions& opts) {
  box.validate();
  link.validate();

  std::atomic<long> evals{0};
  Objective obj{family, link, gain, opts.eval, &evals};
  const std::vector<Dim> dims = active_dims(family, box);

  const std::vector<double> v_grid = linear_grid(box.V_lo, box.V_hi, opts.grid_V);
  const std::vector<double> d_grid =
      family_has_displacement(family)
          ? linear_grid(box.d_lo, box.d_hi, opts.grid_d)
          : std::vector<double>{0.0};
  const std::vector<double> ts_grid =
      family_has_sps(family) ? ts_search_grid(box.Ts_lo, box.Ts_hi, opts.grid_Ts)
                             : std::vector<double>{0.0};

  if (family_has_sps(family)) {
    std::vector<std::pair<double, double>> cells;
    cells.reserve(v_grid.size() * d_grid.size());
    for (double v : v_grid)
      for (double d : d_grid) cells.emplace_back(v, d);
    parallel_for_index(cells.size(), opts.threads, [&](std::size_t i) {
      warm_source_cache(family, cells[i].first, cells[i].second, ts_grid,
                        opts.eval);
    });
  }

  struct GridPoint {
    StateSpec spec;
    double K;
  };
  std::vector<GridPoint> points;
  points.reserve(v_grid.size() * d_grid.size() * ts_grid.size());
  for (double v : v_grid) {
    for (double d : d_grid) {
      for (double ts : ts_grid) {
        StateSpec spec{family, v, d, ts};
        points.push_back({spec, obj(v, d, ts)});
      }
    }
  }

  std::vector<std::size_t> rank(points.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    return better_point(points[a].spec, points[a].K, points[b].spec,
                        points[b].K);
  });

  StateSpec best = points[rank[0]].spec;
  double best_K = points[rank[0]].K;

  std::vector<StateSpec> seeds;
  if (opts.warm_start) {
    StateSpec w = *opts.warm_start;
    w.family = family;
    seeds.push_back(w);
  }
  for (std::size_t i = 0; i < rank.size() && seeds.size() < (opts.warm_start ? 4u : 3u); ++i) {
    if (std::isfinite(points[rank[i]].K)) seeds.push_back(points[rank[i]].spec);
  }

  for (const StateSpec& seed : seeds) {
    std::vector<double> x0(dims.size());
    for (std::size_t j = 0; j < dims.size(); ++j) {
      x0[j] = dims[j].index == 0 ? seed.V : dims[j].index == 1 ? seed.d : seed.Ts;
    }
    const NmResult nm = nelder_mead(obj, family, box, dims, x0,
                                    opts.nm_max_iter, opts.nm_ftol);
    const StateSpec cand = assemble(family, box, dims, nm.x);
    if (better_point(cand, nm.K, best, best_K)) {
      best = cand;
      best_K = nm.K;
    }
  }

  if (!std::isfinite(best_K)) {
    throw PostSelectionError(
        "optimize_key_rate: no evaluable point in the search box", 0.0);
  }

  OptResult res;
  res.best = best;
  res.best_K = best_K;
  res.evaluations = evals.load();
  res.no_positive_key = !(best_K > 0.0);
  for (const Dim& dim : dims) {
    const double scale = std::max(dim.hi - dim.lo, 1e-30);
    const double x = dim.index == 0 ? best.V : dim.index == 1 ? best.d : best.Ts;
    BoundarySide side = BoundarySide::Interior;
    if (x - dim.lo <= 1e-6 * scale) side = BoundarySide::Lower;
    if (dim.hi - x <= 1e-6 * scale) side = BoundarySide::Upper;
    res.at_boundary[dim.index] = side;
  }
  return res;
}

ScanResult scan_variance(StateFamily family, const LinkBudget& link,
                         const std::vector<double>& V_grid, double d,
                         double Ts, const GainSpec& gain,
                         const OptOptions& opts) {
  if (V_grid.empty()) {
    throw std::invalid_argument("scan_variance: empty variance grid");
  }
  std::atomic<long> evals{0};
  Objective obj{family, link, gain, opts.eval, &evals};
  const double dd = family_has_displacement(family) ? d : 0.0;
  const double ts = family_has_sps(family) ? Ts : 0.0;

  ScanResult res;
  res.points.resize(V_grid.size());
  parallel_for_index(V_grid.size(), opts.threads, [&](std::size_t i) {
    res.points[i] = ScanPoint{V_grid[i], obj(V_grid[i], dd, ts)};
  });
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    if (res.argmax_index < 0 ||
        res.points[i].K > res.points[res.argmax_index].K) {
      res.argmax_index = static_cast<int>(i);
    }
  }
  res.argmax_interior = res.argmax_index > 0 &&
                        res.argmax_index + 1 < int(res.points.size());
  return res;
}

namespace {

double bisect_distance(const std::function<double(double)>& key_at,
                       double K_target) {
  if (!(K_target >= 0.0)) {
    throw std::invalid_argument("max_distance: K_target must be >= 0");
  }
  // A zero target means "a positive key exists": degenerate parameter
  // points (V = 1, or Ts -> 1) evaluate to K = 0 exactly and must not count
  // as reaching the target.
  auto reaches = [&](double k) {
    return K_target == 0.0 ? k > 0.0 : k >= K_target;
  };
  if (!reaches(key_at(0.0))) {
    std::ostringstream msg;
    msg << "max_distance: K below target " << K_target << " already at L = 0";
    throw NoBracketError(msg.str());
  }
  double lo = 0.0, hi = 25.0;
  while (reaches(key_at(hi))) {
    lo = hi;
    hi += 25.0;
    if (hi > 1000.0) {
      throw NumericError("max_distance: no crossing found below 1000 km");
    }
  }
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    if (reaches(key_at(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double max_distance(StateFamily family, const LinkBudget& link_template,
                    double K_target, const OptBox& box, const GainSpec& gain,
                    const OptOptions& opts) {
  OptOptions local = opts;
  auto key_at = [&](double L) {
    LinkBudget link = link_template;
    link.L_AC_km = L;
    const OptResult r = optimize_key_rate(family, link, box, gain, local);
    local.warm_start = r.best;  // deterministic warm chain along the bisection
    return r.best_K;
  };
  return bisect_distance(key_at, K_target);
}

double max_distance_fixed(const StateSpec& spec,
                          const LinkBudget& link_template, double K_target,
                          const GainSpec& gain, const OptOptions& opts) {
  spec.validate();
  auto key_at = [&](double L) {
    LinkBudget link = link_template;
    link.L_AC_km = L;
    return secret_key_rate(spec, link, gain, opts.eval).K;
  };
  return bisect_distance(key_at, K_target);
}

std::vector<FrontierPoint> frontier(StateFamily family,
                                    const std::vector<double>& V_grid,
                                    double K_target,
                                    const LinkBudget& link_template,
                                    double fixed_d, double fixed_Ts,
                                    bool optimize_others, const GainSpec& gain,
                                    const OptOptions& opts) {
  std::vector<FrontierPoint> out(V_grid.size());
  parallel_for_index(V_grid.size(), opts.threads, [&](std::size_t i) {
    out[i].V = V_grid[i];
    try {
      if (optimize_others) {
        OptBox box;
        box.V_lo = box.V_hi = V_grid[i];
        OptOptions local = opts;
        local.threads = 1;
        out[i].L_max = max_distance(family, link_template, K_target, box, gain,
                                    local);
      } else {
        StateSpec spec{family, V_grid[i],
                       family_has_displacement(family) ? fixed_d : 0.0,
                       family_has_sps(family) ? fixed_Ts : 0.0};
        out[i].L_max = max_distance_fixed(spec, link_template, K_target, gain,
                                          opts);
      }
    } catch (const NoBracketError&) {
      out[i].L_max.reset();
    } catch (const PostSelectionError&) {
      out[i].L_max.reset();
    }
  });
  return out;
}

std::vector<TracePoint> optimal_parameter_trace(
    StateFamily family, const std::vector<double>& L_grid,
    const LinkBudget& link_template, const OptBox& box, const GainSpec& gain,
    const OptOptions& opts) {
  std::vector<TracePoint> out;
  out.reserve(L_grid.size());
  OptOptions local = opts;
  for (double L : L_grid) {
    LinkBudget link = link_template;
    link.L_AC_km = L;
    const OptResult r = optimize_key_rate(family, link, box, gain, local);
    local.warm_start = r.best;
    out.push_back(TracePoint{L, r.best, r.best_K});
  }
  return out;
}

}  // namespace cvmdi
