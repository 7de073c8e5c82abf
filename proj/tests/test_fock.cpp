#include <doctest.h>

#include <cmath>

#include "cvmdi/errors.hpp"
#include "cvmdi/fock.hpp"
#include "cvmdi/fock_reference.hpp"
#include "cvmdi/gaussian.hpp"

using namespace cvmdi;

namespace {

double closed_form_psps(double V, double Ts) {
  const double lam2 = (V - 1.0) / (V + 1.0);
  return (1.0 - Ts) * lam2 * (1.0 - lam2) /
         ((1.0 - lam2 * Ts) * (1.0 - lam2 * Ts));
}

}  // namespace

TEST_CASE("build_tmsc vacuum and squeezer diagonal") {
  SUBCASE("V=1 is the vacuum for any cutoffs") {
    const FockAmplitudes s = build_tmsc(1.0, 0.0, 12, 17);
    CHECK(s.amp(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.amp.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("V=2 diagonal amplitudes follow sqrt(1-lam^2) lam^n, lam^2 = 1/3") {
    const FockAmplitudes s = build_tmsc(2.0, 0.0, 60, 60);
    const double lam = std::sqrt(1.0 / 3.0);
    const double pref = std::sqrt(1.0 - lam * lam);
    for (int n = 0; n <= 10; ++n) {
      CHECK(s.amp(n, n).real() ==
            doctest::Approx(pref * std::pow(lam, n)).epsilon(1e-12));
      if (n > 0) CHECK(std::abs(s.amp(n, n - 1)) <= 1e-15);
    }
  }
}

TEST_CASE("build_tmsc displaced state: means and mean photon number") {
  const double V = 2.0, d = 0.5;
  const double r = squeeze_parameter(V);
  const double beta = effective_displacement(V, d);
  const FockAmplitudes s = build_tmsc(V, d, 40, 40);
  const Moments mo = moments(s);

  CHECK(mo.mean(0) == doctest::Approx(2.0 * beta).epsilon(1e-10));
  CHECK(mo.mean(2) == doctest::Approx(2.0 * beta).epsilon(1e-10));
  CHECK(std::abs(mo.mean(1)) <= 1e-12);
  CHECK(std::abs(mo.mean(3)) <= 1e-12);

  // <n> per mode from the quadrature moments, against the displaced-thermal
  // decomposition sinh^2 r + beta^2.
  const double n1 = 0.25 * (mo.cov.mode1_q() + mo.cov.mode1_p() +
                            mo.mean(0) * mo.mean(0) + mo.mean(1) * mo.mean(1) -
                            2.0);
  const double expected = std::sinh(r) * std::sinh(r) + beta * beta;
  CHECK(n1 == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("build_tmsc rejects cutoffs that truncate the squeezer tail") {
  CHECK_THROWS_AS(build_tmsc(15.0, 0.0, 30, 30), CutoffError);
  try {
    build_tmsc(15.0, 0.0, 30, 60);
  } catch (const CutoffError& e) {
    CHECK(e.mode() == 1);
  }
}

TEST_CASE("displacement identity against the literal operator ordering") {
  // Squeeze-after-displace with per-mode amplitude d/2, evaluated by dense
  // truncated exponentials; compared on an interior block where the dense
  // route is free of corner truncation artifacts. V = 3 needs a deeper
  // cutoff for its slower squeezer tail.
  struct Case { double V, d; int cutoff; };
  for (const Case c :
       {Case{1.5, 0.2, 24}, Case{2.0, 0.5, 24}, Case{3.0, 0.5, 34}}) {
    const FockAmplitudes built = build_tmsc(c.V, c.d, c.cutoff, c.cutoff);
    const FockAmplitudes direct =
        reference::squeeze_displaced_vacuum_expm(c.V, 0.5 * c.d, c.cutoff);
    const double diff = (built.amp.topLeftCorner(13, 13) -
                         direct.amp.topLeftCorner(13, 13))
                            .cwiseAbs()
                            .maxCoeff();
    CAPTURE(c.V);
    CAPTURE(c.d);
    CHECK(diff <= 1e-8);
  }
}

TEST_CASE("recurrence equals displacement-matrix construction") {
  const FockAmplitudes prod = build_tmsc(6.0, 2.0, 160, 160);
  const FockAmplitudes via_d =
      reference::tmsc_via_displacement_matrices(6.0, 2.0, 160, 160);
  CHECK((prod.amp - via_d.amp).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("displacement matrix agrees with the dense exponential") {
  const Eigen::MatrixXd tri = displacement_matrix(3.0, 31, 31);
  const Eigen::MatrixXd exm = reference::displacement_matrix_expm(3.0, 90);
  CHECK((tri - exm.topLeftCorner(31, 31)).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("subtract_photon reproduces the TMSV closed form") {
  for (double V : {1.5, 6.0}) {
    const FockAmplitudes s = build_tmsc(V, 0.0, 140, 140);
    for (double Ts : {0.5, 0.9, 0.99}) {
      CAPTURE(V);
      CAPTURE(Ts);
      const double p = subtract_photon(s, Ts).p_sps;
      CHECK(p == doctest::Approx(closed_form_psps(V, Ts)).epsilon(1e-10));
    }
  }
}

TEST_CASE("subtract_photon failure modes") {
  const FockAmplitudes s = build_tmsc(6.0, 0.0, 120, 120);
  CHECK_THROWS_AS(subtract_photon(s, 1.0), PostSelectionError);

  const FockAmplitudes vac = build_tmsc(1.0, 0.0, 12, 12);
  try {
    subtract_photon(vac, 0.5);
    FAIL("vacuum input must signal vanishing post-selection");
  } catch (const PostSelectionError& e) {
    CHECK(e.p_sps() == 0.0);
  }
}

TEST_CASE("Kraus route equals the explicit beamsplitter projection") {
  SUBCASE("TMSV input at cutoff 30") {
    const FockAmplitudes s = build_tmsc(2.0, 0.0, 30, 30);
    const SubtractionResult kraus = subtract_photon(s, 0.9);
    const SubtractionResult ref =
        reference::subtract_photon_beamsplitter(s, 0.9);
    CHECK(std::abs(kraus.p_sps - ref.p_sps) <= 1e-12);
    CHECK((kraus.state.amp - ref.state.amp).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("displaced input") {
    const FockAmplitudes s = build_tmsc(2.0, 0.4, 25, 25);
    for (double Ts : {0.3, 0.9}) {
      const SubtractionResult kraus = subtract_photon(s, Ts);
      const SubtractionResult ref =
          reference::subtract_photon_beamsplitter(s, Ts);
      CHECK(std::abs(kraus.p_sps - ref.p_sps) <= 1e-12);
      CHECK((kraus.state.amp - ref.state.amp).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("moments of the analytic families") {
  SUBCASE("TMSV V=2") {
    const Moments mo = moments(build_tmsc(2.0, 0.0, 60, 60));
    const TwoModeCovariance ana = tmsv_covariance(2.0);
    CHECK((mo.cov.m - ana.m).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(mo.mean.cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("TMSC covariance is translation invariant") {
    for (double d : {1.0, 5.0}) {
      const Moments mo = moments(build_tmsc(6.0, d, seed_cutoff(6.0, d),
                                            seed_cutoff(6.0, d)));
      CHECK((mo.cov.m - tmsv_covariance(6.0).m).cwiseAbs().maxCoeff() <= 1e-8);
      const double beta = effective_displacement(6.0, d);
      CHECK(mo.mean(0) == doctest::Approx(2.0 * beta).epsilon(1e-8));
    }
  }
}

TEST_CASE("SPS-TMSV covariance golden point (V=2, Ts=0.9)") {
  // The converged covariance is exactly diag(33/7, 19/7) with cross
  // 4 sqrt(30)/7, confirmed by an independent Fock simulation.
  const FockAmplitudes s = build_tmsc(2.0, 0.0, 80, 80);
  const SubtractionResult sub = subtract_photon(s, 0.9);
  CHECK(sub.p_sps ==
        doctest::Approx(closed_form_psps(2.0, 0.9)).epsilon(1e-12));
  const TwoModeCovariance cov = moments(sub.state).cov;
  CHECK(cov.mode1_q() == doctest::Approx(33.0 / 7.0).epsilon(1e-9));
  CHECK(cov.mode1_p() == doctest::Approx(33.0 / 7.0).epsilon(1e-9));
  CHECK(cov.mode2_q() == doctest::Approx(19.0 / 7.0).epsilon(1e-9));
  CHECK(cov.cross_q() ==
        doctest::Approx(4.0 * std::sqrt(30.0) / 7.0).epsilon(1e-9));
  CHECK(cov.cross_p() ==
        doctest::Approx(-4.0 * std::sqrt(30.0) / 7.0).epsilon(1e-9));
  CHECK(cov.block_defect() <= 1e-12);
}

TEST_CASE("heavy displaced point cross-route golden (V=15, d=5, Ts=0.99)") {
  // Frozen from an independent generating-function simulation at cutoffs
  // 660/700 (converged to ~1e-8).
  const int n = seed_cutoff(15.0, 5.0);
  const FockAmplitudes s = build_tmsc(15.0, 5.0, n, n);
  const SubtractionResult sub = subtract_photon(s, 0.99);
  CHECK(sub.p_sps == doctest::Approx(2.76193025701079e-01).epsilon(1e-8));
  const Moments mo = moments(sub.state);
  CHECK(mo.cov.mode1_q() == doctest::Approx(1.34224891819923e+01).epsilon(1e-7));
  CHECK(mo.cov.cross_q() == doctest::Approx(1.34233787923447e+01).epsilon(1e-7));
  CHECK(mo.cov.mode2_q() == doctest::Approx(1.34934812529298e+01).epsilon(1e-7));
  CHECK(mo.cov.mode1_p() == doctest::Approx(1.45282744942420e+01).epsilon(1e-7));
  CHECK(mo.cov.cross_p() == doctest::Approx(-1.44525614063310e+01).epsilon(1e-7));
  CHECK(mo.mean(0) == doctest::Approx(2.65082030924872e+01).epsilon(1e-7));
}

TEST_CASE("post-SPS states are physical") {
  for (double V : {1.5, 6.0, 15.0}) {
    for (double Ts : {0.3, 0.9, 0.995}) {
      const int n = seed_cutoff(V, 1.0);
      const SubtractionResult sub =
          subtract_photon(build_tmsc(V, 1.0, n, n), Ts);
      REQUIRE(sub.p_sps > 0.0);
      REQUIRE(sub.p_sps <= 1.0);
      const TwoModeCovariance cov = moments(sub.state).cov;
      const SymplecticPair nu = symplectic_eigenvalues_generic(cov);
      REQUIRE(nu.nu2 >= 1.0 - 1e-9);
      REQUIRE(cov.symmetry_defect() <= 1e-12);
      REQUIRE(cov.block_defect() <= 1e-10);
    }
  }
}

TEST_CASE("P_SPS is continuous in Ts on a sampled grid") {
  const FockAmplitudes s = build_tmsc(2.0, 0.0, 80, 80);
  const double h = 0.02;
  double prev = subtract_photon(s, 0.0).p_sps;
  double max_slope = 0.0, sum_slope = 0.0;
  int count = 0;
  for (double t = h; t <= 0.98 + 1e-12; t += h) {
    const double p = subtract_photon(s, t).p_sps;
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
    const double slope = std::abs(p - prev) / h;
    max_slope = std::max(max_slope, slope);
    sum_slope += slope;
    ++count;
    prev = p;
  }
  CHECK(max_slope <= 10.0 * (sum_slope / count) + 1e-12);
}

TEST_CASE("d = 0 SPS-TMSC pipeline equals the SPS-TMSV pipeline") {
  const int n = 120;
  const FockAmplitudes a = build_tmsc(6.0, 0.0, n, n);
  const SubtractionResult sa = subtract_photon(a, 0.9);
  // identical construction path for both families when d = 0
  const TwoModeCovariance ca = moments(sa.state).cov;
  const StateSpec tmsv_like{StateFamily::SpsTmsv, 6.0, 0.0, 0.9};
  const StateSpec tmsc_like{StateFamily::SpsTmsc, 6.0, 0.0, 0.9};
  const auto qa = resolve_cutoff(tmsv_like, 1e-8);
  const auto qb = resolve_cutoff(tmsc_like, 1e-8);
  CHECK(qa == qb);
  CHECK(sa.p_sps == doctest::Approx(closed_form_psps(6.0, 0.9)).epsilon(1e-10));
  CHECK(ca.block_defect() <= 1e-12);
}

TEST_CASE("truncated-norm deficiency decreases with the cutoff") {
  double prev = 1.0;
  for (int n : {40, 60, 80, 100}) {
    const FockAmplitudes raw =
        reference::tmsc_via_displacement_matrices(3.0, 1.0, n, n);
    const double deficiency = std::abs(raw.norm_sq - 1.0);
    CHECK(deficiency <= prev + 1e-15);
    prev = deficiency;
  }
}

TEST_CASE("resolve_cutoff") {
  SUBCASE("vacuum converges at the smallest probe") {
    const auto [n1, n2] = resolve_cutoff({StateFamily::Tmsv, 1.0, 0.0, 0.0}, 1e-8);
    CHECK(n1 == 10);
    CHECK(n2 == 10);
  }
  SUBCASE("converged TMSV covariance matches the analytic matrix") {
    const auto [n1, n2] =
        resolve_cutoff({StateFamily::Tmsv, 15.0, 0.0, 0.0}, 1e-8);
    const Moments mo = moments(build_tmsc(15.0, 0.0, n1, n2));
    CHECK((mo.cov.m - tmsv_covariance(15.0).m).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("SPS state resolves near the seed heuristic") {
    const StateSpec spec{StateFamily::SpsTmsc, 6.0, 2.0, 0.9};
    const auto [n1, n2] = resolve_cutoff(spec, 1e-8);
    CHECK(n1 == n2);
    CHECK(n1 >= 60);
    CHECK(n1 <= seed_cutoff(6.0, 2.0));
  }
  SUBCASE("hard cap raises with a mean-photon diagnostic") {
    CutoffPolicy policy;
    policy.hard_cap = 60;
    try {
      resolve_cutoff({StateFamily::SpsTmsc, 15.0, 5.0, 0.99}, 1e-8, policy);
      FAIL("expected CutoffCapError");
    } catch (const CutoffCapError& e) {
      CHECK(e.mean_photons() > 100.0);
    }
  }
}
