#include <doctest.h>

#include <cmath>

#include "cvmdi/errors.hpp"
#include "cvmdi/optimize.hpp"

using namespace cvmdi;

namespace {

LinkBudget link_at(double L) {
  LinkBudget link;
  link.L_AC_km = L;
  return link;
}

}  // namespace

TEST_CASE("search grids") {
  const auto v = linear_grid(1.0, 15.0, 15);
  CHECK(v.size() == 15);
  CHECK(v.front() == 1.0);
  CHECK(v.back() == 15.0);

  const auto ts = ts_search_grid(0.0, 1.0, 21);
  CHECK(ts.size() == 21);
  CHECK(ts.front() == 0.0);
  CHECK(ts.back() == doctest::Approx(0.999));
  // densified shoulder near 1
  int near_one = 0;
  for (double t : ts) near_one += (t >= 0.9);
  CHECK(near_one >= 9);
  CHECK(std::is_sorted(ts.begin(), ts.end()));
}

TEST_CASE("optimizer is deterministic") {
  const OptResult a = optimize_key_rate(StateFamily::SpsTmsv, link_at(25.0));
  const OptResult b = optimize_key_rate(StateFamily::SpsTmsv, link_at(25.0));
  CHECK(a.best_K == b.best_K);
  CHECK(a.best.V == b.best.V);
  CHECK(a.best.Ts == b.best.Ts);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("reported optimum recomputes to the reported rate") {
  const LinkBudget link = link_at(35.0);
  const OptResult res = optimize_key_rate(StateFamily::SpsTmsv, link);
  const double direct = secret_key_rate(res.best, link).K;
  CHECK(std::abs(res.best_K - direct) <= 1e-12);
}

TEST_CASE("refinement never loses to the coarse grid") {
  const LinkBudget link = link_at(60.0);
  const OptResult res = optimize_key_rate(StateFamily::SpsTmsv, link);
  double grid_best = -1e300;
  OptOptions opts;
  for (double v : linear_grid(1.0, 15.0, opts.grid_V)) {
    for (double ts : ts_search_grid(0.0, 1.0, opts.grid_Ts)) {
      try {
        const double k =
            secret_key_rate({StateFamily::SpsTmsv, v, 0.0, ts}, link).K;
        grid_best = std::max(grid_best, k);
      } catch (const PostSelectionError&) {
      }
    }
  }
  CHECK(res.best_K >= grid_best - 1e-15);
}

TEST_CASE("TMSV optimum sits at the variance bound for short links") {
  const OptResult res = optimize_key_rate(StateFamily::Tmsv, link_at(25.0));
  CHECK(res.best.V == doctest::Approx(15.0).epsilon(1e-9));
  CHECK(res.at_boundary[0] == BoundarySide::Upper);
  CHECK(res.best_K > 0.2);
  CHECK(!res.no_positive_key);
}

TEST_CASE("SPS-TMSV optimal transmissivity drops well below unity") {
  const OptResult res = optimize_key_rate(StateFamily::SpsTmsv, link_at(25.0));
  CHECK(res.best.Ts < 0.95);
  CHECK(res.best.Ts > 0.3);
  CHECK(res.best.V == doctest::Approx(15.0).epsilon(1e-6));
}

TEST_CASE("pinning d to zero reproduces the reduced family") {
  OptBox pinned;
  pinned.d_lo = pinned.d_hi = 0.0;
  const OptResult sc =
      optimize_key_rate(StateFamily::SpsTmsc, link_at(40.0), pinned);
  const OptResult sv = optimize_key_rate(StateFamily::SpsTmsv, link_at(40.0));
  CHECK(sc.best_K == doctest::Approx(sv.best_K).epsilon(1e-12));
  CHECK(sc.best.V == doctest::Approx(sv.best.V).epsilon(1e-9));
  CHECK(sc.best.Ts == doctest::Approx(sv.best.Ts).epsilon(1e-9));
}

TEST_CASE("scan_variance") {
  SUBCASE("V = 1 yields no key") {
    const ScanResult res = scan_variance(StateFamily::Tmsv, link_at(50.0),
                                         {1.0, 2.0, 6.0}, 0.0, 0.0);
    CHECK(res.points[0].K <= 0.0);
    CHECK(res.points[2].K > 0.0);
  }
  SUBCASE("single peak with argmax moving down in distance") {
    std::vector<double> grid;
    for (double v = 1.0; v <= 15.0 + 1e-9; v += 0.5) grid.push_back(v);
    double prev_argmax = 1e9;
    for (double L : {40.0, 80.0, 120.0}) {
      const ScanResult res =
          scan_variance(StateFamily::Tmsv, link_at(L), grid, 0.0, 0.0);
      int maxima = 0;
      for (std::size_t i = 1; i + 1 < res.points.size(); ++i) {
        if (res.points[i].K > res.points[i - 1].K &&
            res.points[i].K > res.points[i + 1].K) {
          ++maxima;
        }
      }
      CHECK(maxima <= 1);
      const double vstar = res.points[res.argmax_index].V;
      CHECK(vstar < prev_argmax);
      prev_argmax = vstar;
    }
  }
  SUBCASE("values recompute end to end at L=80") {
    const ScanResult res = scan_variance(StateFamily::Tmsv, link_at(80.0),
                                         {2.0, 8.5, 15.0}, 0.0, 0.0);
    CHECK(res.points[1].K == doctest::Approx(1.51645441e-02).epsilon(1e-7));
    for (const ScanPoint& p : res.points) {
      const double direct =
          secret_key_rate({StateFamily::Tmsv, p.V, 0.0, 0.0}, link_at(80.0)).K;
      REQUIRE(p.K == direct);
    }
  }
  SUBCASE("empty grid is rejected") {
    CHECK_THROWS_AS(
        scan_variance(StateFamily::Tmsv, link_at(80.0), {}, 0.0, 0.0),
        std::invalid_argument);
  }
}

TEST_CASE("max_distance") {
  OptBox pinned;
  pinned.V_lo = pinned.V_hi = 6.0;
  SUBCASE("positive key at zero distance brackets a crossing") {
    const double lmax =
        max_distance(StateFamily::Tmsv, LinkBudget{}, 0.0, pinned);
    CHECK(lmax > 120.0);
    CHECK(lmax < 160.0);
    const double fixed = max_distance_fixed({StateFamily::Tmsv, 6.0, 0.0, 0.0},
                                            LinkBudget{}, 0.0);
    CHECK(lmax == doctest::Approx(fixed).epsilon(1e-6));
  }
  SUBCASE("monotone in the target rate") {
    const double l0 = max_distance_fixed({StateFamily::Tmsv, 6.0, 0.0, 0.0},
                                         LinkBudget{}, 0.0);
    const double l1 = max_distance_fixed({StateFamily::Tmsv, 6.0, 0.0, 0.0},
                                         LinkBudget{}, 1e-3);
    const double l2 = max_distance_fixed({StateFamily::Tmsv, 6.0, 0.0, 0.0},
                                         LinkBudget{}, 1e-2);
    CHECK(l1 <= l0);
    CHECK(l2 <= l1);
  }
  SUBCASE("unreachable target reports no bracket") {
    CHECK_THROWS_AS(max_distance_fixed({StateFamily::Tmsv, 6.0, 0.0, 0.0},
                                       LinkBudget{}, 10.0),
                    NoBracketError);
  }
}

TEST_CASE("frontier marks hopeless variances as absent") {
  const auto points = frontier(StateFamily::Tmsv, {1.0, 6.0}, 1e-3,
                               LinkBudget{}, 0.0, 0.0);
  REQUIRE(points.size() == 2);
  CHECK(!points[0].L_max.has_value());
  REQUIRE(points[1].L_max.has_value());
  CHECK(*points[1].L_max > 100.0);
}

TEST_CASE("optimal_parameter_trace runs deterministically along a grid") {
  const std::vector<double> grid = {25.0, 60.0};
  const auto trace = optimal_parameter_trace(StateFamily::SpsTmsv, grid,
                                             LinkBudget{});
  REQUIRE(trace.size() == 2);
  CHECK(trace[0].L == 25.0);
  CHECK(trace[0].K > trace[1].K);
  const auto again = optimal_parameter_trace(StateFamily::SpsTmsv, grid,
                                             LinkBudget{});
  CHECK(trace[1].K == again[1].K);
  CHECK(trace[1].best.Ts == again[1].best.Ts);
}

TEST_CASE("SPS-TMSV optimal transmissivity keeps dropping with distance") {
  const auto trace = optimal_parameter_trace(StateFamily::SpsTmsv,
                                             {25.0, 75.0, 125.0}, LinkBudget{});
  REQUIRE(trace.size() == 3);
  CHECK(trace[1].best.Ts < trace[0].best.Ts);
  CHECK(trace[2].best.Ts < trace[1].best.Ts);
  CHECK(trace[2].best.Ts < 0.8);
}

TEST_CASE("TMSV distance frontier peaks near V = 6") {
  const std::vector<double> grid = {2.0, 4.0, 6.0, 8.0, 12.0, 15.0};
  const auto points = frontier(StateFamily::Tmsv, grid, 0.0, LinkBudget{},
                               0.0, 0.0);
  double best_v = 0.0, best_l = -1.0;
  for (const FrontierPoint& p : points) {
    REQUIRE(p.L_max.has_value());
    if (*p.L_max > best_l) {
      best_l = *p.L_max;
      best_v = p.V;
    }
  }
  CHECK(best_v >= 4.0);
  CHECK(best_v <= 8.0);
}

TEST_CASE("box validation") {
  OptBox box;
  box.V_lo = 3.0;
  box.V_hi = 2.0;
  CHECK_THROWS_AS(box.validate(), std::invalid_argument);
}
