#include "cvmdi/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "cvmdi/channel.hpp"
#include "cvmdi/errors.hpp"
#include "cvmdi/fock.hpp"
#include "cvmdi/fock_reference.hpp"
#include "cvmdi/keyrate.hpp"

namespace cvmdi {

namespace {

struct Failure {
  std::string detail;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw Failure{detail};
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

void check_psps_closed_form() {
  for (double V : {1.5, 2.0, 6.0}) {
    const double lam2 = (V - 1.0) / (V + 1.0);
    const int n = 140;
    const FockAmplitudes state = build_tmsc(V, 0.0, n, n);
    for (double ts : {0.5, 0.9, 0.99}) {
      const double p = subtract_photon(state, ts).p_sps;
      const double closed =
          (1.0 - ts) * lam2 * (1.0 - lam2) / ((1.0 - lam2 * ts) * (1.0 - lam2 * ts));
      require(std::abs(p - closed) <= 1e-10,
              "P_SPS mismatch at V=" + num(V) + " Ts=" + num(ts) + ": " +
                  num(p) + " vs closed form " + num(closed));
    }
  }
}

void check_kraus_vs_beamsplitter() {
  for (double d : {0.0, 0.4}) {
    const FockAmplitudes state = build_tmsc(2.0, d, 20, 20);
    for (double ts : {0.3, 0.9}) {
      const SubtractionResult kraus = subtract_photon(state, ts);
      const SubtractionResult ref =
          reference::subtract_photon_beamsplitter_expm(state, ts);
      require(std::abs(kraus.p_sps - ref.p_sps) <= 1e-12,
              "heralding probability differs from beamsplitter route at d=" +
                  num(d) + " Ts=" + num(ts));
      const std::complex<double> overlap =
          (ref.state.amp.conjugate().cwiseProduct(kraus.state.amp)).sum();
      const double sign = overlap.real() >= 0.0 ? 1.0 : -1.0;
      const double diff =
          (kraus.state.amp - sign * ref.state.amp).cwiseAbs().maxCoeff();
      require(diff <= 1e-10, "heralded state differs from beamsplitter route "
                             "by " + num(diff));
    }
  }
}

void check_displacement_identity() {
  // Production state against the literal squeeze-after-displace exponential
  // (interior block; the dense route carries corner truncation artifacts).
  const FockAmplitudes built = build_tmsc(2.0, 0.5, 24, 24);
  const FockAmplitudes direct =
      reference::squeeze_displaced_vacuum_expm(2.0, 0.25, 24);
  const double diff = (built.amp.topLeftCorner(13, 13) -
                       direct.amp.topLeftCorner(13, 13))
                          .cwiseAbs()
                          .maxCoeff();
  require(diff <= 1e-8,
          "displacement identity violated on interior block: " + num(diff));

  // Interior window of a larger expm: the dense route distorts entries near
  // its own truncation boundary.
  const Eigen::MatrixXd tri = displacement_matrix(5.0, 41, 41);
  const Eigen::MatrixXd exm = reference::displacement_matrix_expm(5.0, 100);
  const double ddiff =
      (tri - exm.topLeftCorner(41, 41)).cwiseAbs().maxCoeff();
  require(ddiff <= 1e-10,
          "displacement matrix tridiagonal vs expm route: " + num(ddiff));

  // Recurrence-built state against the displacement-matrix application.
  const FockAmplitudes via_d = reference::tmsc_via_displacement_matrices(
      6.0, 2.0, 160, 160);
  const FockAmplitudes prod = build_tmsc(6.0, 2.0, 160, 160);
  const double sdiff = (via_d.amp - prod.amp).cwiseAbs().maxCoeff();
  require(sdiff <= 1e-9,
          "recurrence vs displacement-matrix construction: " + num(sdiff));
}

void check_symplectic_oracle() {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uV(1.0, 16.0);
  std::uniform_real_distribution<double> uT(0.05, 1.0);
  std::uniform_real_distribution<double> uE(0.0, 5.0);
  std::uniform_real_distribution<double> uAngle(0.0, 6.28318530717958647692);
  std::uniform_real_distribution<double> uS(-0.3, 0.3);
  for (int i = 0; i < 300; ++i) {
    OneWayChannel ch;
    ch.T = uT(rng);
    ch.eps_th = uE(rng);
    TwoModeCovariance cov = propagate(tmsv_covariance(uV(rng)), ch);
    // Block-preserving symplectic conjugations: beamsplitter mixing plus
    // per-mode squeeze.
    const double th = uAngle(rng);
    const double c = std::cos(th), s = std::sin(th);
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    M(0, 0) = c; M(0, 2) = s; M(2, 0) = -s; M(2, 2) = c;
    M(1, 1) = c; M(1, 3) = s; M(3, 1) = -s; M(3, 3) = c;
    const double s1 = std::exp(uS(rng)), s2 = std::exp(uS(rng));
    Eigen::Vector4d squeeze(s1, 1.0 / s1, s2, 1.0 / s2);
    M = squeeze.asDiagonal() * M;
    cov.m = M * cov.m * M.transpose();

    const SymplecticPair closed = symplectic_eigenvalues(cov);
    const SymplecticPair generic = symplectic_eigenvalues_generic(cov);
    const double scale = std::max(1.0, closed.nu1);
    require(std::abs(closed.nu1 - generic.nu1) <= 1e-9 * scale &&
                std::abs(closed.nu2 - generic.nu2) <= 1e-9 * scale,
            "symplectic routes disagree on sample " + std::to_string(i));
  }
}

void check_channel_identity() {
  LinkBudget link;
  for (double L = 0.0; L <= 200.0 + 1e-9; L += 10.0) {
    link.L_AC_km = L;
    const OneWayChannel ch = one_way_reduce(link, 6.0);
    const double T_A = transmissivity_from_distance(L, link.w_db_per_km);
    const double eps_A = excess_noise_at(L, link.eps_a0, link.eps_a1);
    const double lhs = ch.eps_th - eps_A;
    const double rhs = link.eps_B / T_A;
    require(std::abs(lhs - rhs) <= 1e-15 * std::max(1.0, std::abs(rhs)),
            "T_B=1 reduction identity violated at L=" + num(L));
  }
}

void check_entropy_anchors() {
  require(entropy_g(1.0) == 0.0, "g(1) must be exactly 0");
  require(std::abs(entropy_g(3.0) - 2.0) <= 1e-12, "g(3) must equal 2");
  require(entropy_g(1.0 + 1e-12) == 0.0, "clamp band below 1e-9 must hold");
  for (double V : {1.0, 2.0, 15.0}) {
    const double S = von_neumann_entropy(tmsv_covariance(V));
    require(std::abs(S) <= 1e-9, "pure TMSV entropy nonzero at V=" + num(V));
  }
}

void check_pipeline_physicality() {
  LinkBudget link;
  for (double L : {10.0, 60.0, 120.0}) {
    link.L_AC_km = L;
    for (double V : {2.0, 6.0, 12.0}) {
      const KeyRateBreakdown tmsv =
          secret_key_rate({StateFamily::Tmsv, V, 0.0, 0.0}, link);
      require(tmsv.nu1 >= 1.0 - 1e-9 && tmsv.nu2 >= 1.0 - 1e-9,
              "unphysical propagated covariance (tmsv)");
      require(tmsv.chi_BE >= -1e-9, "negative Holevo bound (tmsv)");
      require(tmsv.I_AB >= 0.0, "negative mutual information");
      const KeyRateBreakdown sps =
          secret_key_rate({StateFamily::SpsTmsv, V, 0.0, 0.9}, link);
      require(sps.nu1 >= 1.0 - 1e-9 && sps.nu2 >= 1.0 - 1e-9,
              "unphysical propagated covariance (sps-tmsv)");
      require(sps.chi_BE >= -1e-9, "negative Holevo bound (sps-tmsv)");
      require(sps.p_sps > 0.0 && sps.p_sps <= 1.0, "P_SPS outside (0, 1]");
    }
  }
}

void check_golden_fixture(const std::string& dir) {
  const std::string path = dir + "/sps_tmsv_v2_ts0p9_amps.csv";
  std::ifstream in(path);
  require(bool(in), "cannot open fixture " + path);

  const FockAmplitudes state = build_tmsc(2.0, 0.0, 40, 40);
  const SubtractionResult sub = subtract_photon(state, 0.9);

  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int n1, n2;
    double re, im;
    char comma;
    ls >> n1 >> comma >> n2 >> comma >> re >> comma >> im;
    require(bool(ls), "malformed fixture row: " + line);
    require(n1 >= 0 && n1 <= 40 && n2 >= 0 && n2 <= 40,
            "fixture index out of range: " + line);
    const std::complex<double> got = sub.state.amp(n1, n2);
    require(std::abs(got - std::complex<double>(re, im)) <= 1e-10,
            "fixture amplitude mismatch at (" + std::to_string(n1) + "," +
                std::to_string(n2) + ")");
    ++rows;
  }
  require(rows > 10, "fixture has too few rows");

  // Converged covariance of this state is exactly (33/7, 19/7, 4 sqrt30 / 7).
  const TwoModeCovariance cov = moments(sub.state).cov;
  require(std::abs(cov.mode1_q() - 33.0 / 7.0) <= 1e-9 &&
              std::abs(cov.mode2_q() - 19.0 / 7.0) <= 1e-9 &&
              std::abs(cov.cross_q() - 4.0 * std::sqrt(30.0) / 7.0) <= 1e-9,
          "fixture covariance deviates from the exact values");
}

}  // namespace

std::string default_fixture_dir() {
#ifdef CVMDI_FIXTURE_DIR
  return CVMDI_FIXTURE_DIR;
#else
  return "fixtures";
#endif
}

std::vector<CheckResult> run_selfchecks(const std::string& fixtures_dir) {
  const std::string dir =
      fixtures_dir.empty() ? default_fixture_dir() : fixtures_dir;
  std::vector<std::pair<std::string, std::function<void()>>> checks = {
      {"psps-closed-form", check_psps_closed_form},
      {"kraus-vs-beamsplitter", check_kraus_vs_beamsplitter},
      {"displacement-identity", check_displacement_identity},
      {"symplectic-oracle", check_symplectic_oracle},
      {"channel-identity", check_channel_identity},
      {"entropy-anchors", check_entropy_anchors},
      {"pipeline-physicality", check_pipeline_physicality},
      {"golden-fixture", [&] { check_golden_fixture(dir); }},
  };

  std::vector<CheckResult> results;
  results.reserve(checks.size());
  for (auto& [name, fn] : checks) {
    CheckResult res;
    res.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
      res.pass = true;
    } catch (const Failure& f) {
      res.pass = false;
      res.detail = f.detail;
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = e.what();
    }
    res.millis = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace cvmdi
