#include "cvmdi/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "cvmdi/errors.hpp"

namespace cvmdi {

namespace {

constexpr double kTmsvTailTol = 1e-10;   // squeezer diagonal mass past cutoff
constexpr double kNormTol = 1e-6;        // post-construction norm check
constexpr double kDiagKeepTol = 1e-18;   // diagonal mass dropped in the build
constexpr double kVanishingP = 1e-15;

// Smallest k with lam^{2(k+1)} <= tol (mass of the squeezer diagonal past k).
int diag_tail_bound(double lam, double tol) {
  if (lam <= 0.0) return 0;
  const double n = -std::log(tol) / (-2.0 * std::log(lam));
  return static_cast<int>(std::ceil(n)) + 1;
}

int round_up_to(int value, int step) {
  return ((value + step - 1) / step) * step;
}

}  // namespace

Eigen::MatrixXd displacement_matrix(double alpha, int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("displacement_matrix: empty shape");
  }
  if (alpha == 0.0) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, cols);
    const int n = std::min(rows, cols);
    for (int i = 0; i < n; ++i) D(i, i) = 1.0;
    return D;
  }
  // exp(alpha(a+ - a)) = U exp(-i S) U+ with U = diag(i^m) and S real
  // symmetric tridiagonal (off-diagonal alpha sqrt(m+1)). The tridiagonal
  // eigendecomposition keeps the result orthogonal to solver accuracy; the
  // parity structure of cos(S)/sin(S) makes every entry real. The internal
  // dimension is padded: the truncated-generator exponential distorts
  // entries near its boundary, and the distortion decays within a few tens
  // of rows.
  const int requested = std::max(rows, cols);
  const int dim = requested + 40 +
                  static_cast<int>(std::ceil(8.0 * std::abs(alpha) +
                                             0.1 * requested));
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sub(dim - 1);
  for (int m = 0; m + 1 < dim; ++m) sub(m) = alpha * std::sqrt(double(m + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& Q = es.eigenvectors();
  const Eigen::VectorXd& L = es.eigenvalues();
  const Eigen::MatrixXd Qt = Q.topRows(cols).transpose();  // = Q^T(:, :cols)
  const Eigen::MatrixXd C =
      Q.topRows(rows) * (L.array().cos().matrix().asDiagonal() * Qt);
  const Eigen::MatrixXd S =
      Q.topRows(rows) * (L.array().sin().matrix().asDiagonal() * Qt);
  Eigen::MatrixXd D(rows, cols);
  for (int m = 0; m < rows; ++m) {
    for (int n = 0; n < cols; ++n) {
      switch (((m - n) % 4 + 4) % 4) {
        case 0: D(m, n) = C(m, n); break;
        case 1: D(m, n) = S(m, n); break;
        case 2: D(m, n) = -C(m, n); break;
        default: D(m, n) = -S(m, n); break;
      }
    }
  }
  return D;
}

FockAmplitudes build_tmsc(double V, double d, int n1_cutoff, int n2_cutoff) {
  if (!(V >= 1.0)) throw std::invalid_argument("build_tmsc: V must be >= 1");
  if (!(d >= 0.0)) throw std::invalid_argument("build_tmsc: d must be >= 0");
  if (n1_cutoff < 1 || n2_cutoff < 1) {
    throw std::invalid_argument("build_tmsc: cutoffs must be >= 1");
  }

  const double r = squeeze_parameter(V);
  const double lam = std::tanh(r);
  const double beta = effective_displacement(V, d);
  const int n_diag = std::min(n1_cutoff, n2_cutoff);

  // Squeezer diagonal sqrt(1-lam^2) lam^k lives on |k,k>; its mass past the
  // cutoff is lam^{2(n_diag+1)}.
  const double tail = std::pow(lam * lam, double(n_diag + 1));
  if (tail > kTmsvTailTol) {
    const int mode = (n1_cutoff <= n2_cutoff) ? 1 : 2;
    std::ostringstream msg;
    msg << "build_tmsc: cutoff " << std::min(n1_cutoff, n2_cutoff)
        << " on mode " << mode << " leaves squeezer tail mass " << tail
        << " > " << kTmsvTailTol << " (V=" << V << ")";
    throw CutoffError(msg.str(), mode);
  }

  FockAmplitudes out;
  out.n1_cutoff = n1_cutoff;
  out.n2_cutoff = n2_cutoff;

  Eigen::MatrixXd grid;
  if (beta == 0.0) {
    const int k_max = std::min(n_diag, diag_tail_bound(lam, kDiagKeepTol));
    grid = Eigen::MatrixXd::Zero(n1_cutoff + 1, n2_cutoff + 1);
    const double pref = std::sqrt(1.0 - lam * lam);
    double pw = 1.0;
    for (int k = 0; k <= k_max; ++k) {
      grid(k, k) = pref * pw;
      pw *= lam;
    }
  } else {
    // Normal-ordered form: the state is proportional to
    // exp(lam a1+ a2+ + gam(a1+ + a2+))|00> with gam = beta(1 - lam) and
    // prefactor sqrt(1-lam^2) exp(-beta^2 (1-lam)); its amplitudes follow
    // the two-term recurrence
    //   sqrt(m+1) psi(m+1, n) = gam psi(m, n) + lam sqrt(n) psi(m, n-1),
    // which stays stable because every coefficient is O(1) here.
    const double gam = beta * (1.0 - lam);
    const double log_pref = 0.5 * std::log1p(-lam * lam) -
                            beta * beta * (1.0 - lam);
    if (log_pref < -700.0) {
      std::ostringstream msg;
      msg << "build_tmsc: displacement beta=" << beta
          << " too large to represent in doubles";
      throw CutoffCapError(msg.str(), beta * beta);
    }
    grid.resize(n1_cutoff + 1, n2_cutoff + 1);
    std::vector<double> sq(n2_cutoff + 2);
    for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = std::sqrt(double(k));
    grid(0, 0) = std::exp(log_pref);
    for (int n = 0; n < n2_cutoff; ++n) {
      grid(0, n + 1) = gam * grid(0, n) / sq[n + 1];
    }
    for (int m = 0; m < n1_cutoff; ++m) {
      const double inv = 1.0 / std::sqrt(double(m + 1));
      grid(m + 1, 0) = gam * grid(m, 0) * inv;
      for (int n = 1; n <= n2_cutoff; ++n) {
        grid(m + 1, n) =
            (gam * grid(m, n) + lam * sq[n] * grid(m, n - 1)) * inv;
      }
    }
  }

  const double norm_sq = grid.squaredNorm();
  if (std::abs(norm_sq - 1.0) > kNormTol) {
    // Attribute the loss to the mode with more mass stuck at its edge.
    const double edge1 = grid.row(n1_cutoff).squaredNorm();
    const double edge2 = grid.col(n2_cutoff).squaredNorm();
    const int mode = (edge1 >= edge2) ? 1 : 2;
    std::ostringstream msg;
    msg << "build_tmsc: cutoff too small on mode " << mode << " (|norm^2-1| = "
        << std::abs(norm_sq - 1.0) << " > " << kNormTol << " at V=" << V
        << ", d=" << d << ", cutoffs " << n1_cutoff << "," << n2_cutoff << ")";
    throw CutoffError(msg.str(), mode);
  }

  out.amp = (grid / std::sqrt(norm_sq)).cast<std::complex<double>>();
  out.norm_sq = out.amp.squaredNorm();
  return out;
}

SubtractionResult subtract_photon(const FockAmplitudes& state, double Ts) {
  if (!(Ts >= 0.0 && Ts <= 1.0)) {
    throw std::invalid_argument("subtract_photon: Ts must lie in [0, 1]");
  }
  if (!state.is_normalized()) {
    throw std::invalid_argument("subtract_photon: input state not normalized");
  }
  const int n1 = state.n1_cutoff, n2 = state.n2_cutoff;
  // M1 = sqrt(1-Ts) Ts^{n/2} a: out(., m) = sqrt(1-Ts) Ts^{m/2} sqrt(m+1)
  // amp(., m+1).
  const double root_ts = std::sqrt(Ts);
  Eigen::VectorXd scale(n2 + 1);
  double damp = std::sqrt(1.0 - Ts);
  for (int m = 0; m <= n2; ++m) {
    scale(m) = damp * std::sqrt(double(m + 1));
    damp *= root_ts;
  }
  SubtractionResult res;
  res.state.n1_cutoff = n1;
  res.state.n2_cutoff = n2;
  res.state.amp = Eigen::MatrixXcd::Zero(n1 + 1, n2 + 1);
  for (int m = 0; m < n2; ++m) {
    res.state.amp.col(m) = scale(m) * state.amp.col(m + 1);
  }
  const double p = res.state.amp.squaredNorm();
  if (p < kVanishingP) {
    std::ostringstream msg;
    msg << "subtract_photon: heralding probability " << p
        << " vanishes (Ts=" << Ts << ")";
    throw PostSelectionError(msg.str(), p);
  }
  res.p_sps = p;
  res.state.amp /= std::sqrt(p);
  res.state.norm_sq = res.state.amp.squaredNorm();
  return res;
}

Moments moments(const FockAmplitudes& state) {
  if (!state.is_normalized()) {
    throw std::invalid_argument("moments: input state not normalized");
  }
  using cplx = std::complex<double>;
  const int n1 = state.n1_cutoff, n2 = state.n2_cutoff;
  const auto& a = state.amp;
  std::vector<double> sq(std::max(n1, n2) + 3);
  for (std::size_t m = 0; m < sq.size(); ++m) sq[m] = std::sqrt(double(m));

  cplx a1{}, a2{}, s1{}, s2{}, E{}, F{};
  double nn1 = 0.0, nn2 = 0.0;
  for (int m = 0; m <= n1; ++m) {
    for (int n = 0; n <= n2; ++n) {
      const cplx c = std::conj(a(m, n));
      if (c == cplx{} && a(m, n) == cplx{}) continue;
      const double w = std::norm(a(m, n));
      nn1 += double(m) * w;
      nn2 += double(n) * w;
      if (m < n1) a1 += c * sq[m + 1] * a(m + 1, n);
      if (n < n2) a2 += c * sq[n + 1] * a(m, n + 1);
      if (m + 2 <= n1) s1 += c * sq[m + 1] * sq[m + 2] * a(m + 2, n);
      if (n + 2 <= n2) s2 += c * sq[n + 1] * sq[n + 2] * a(m, n + 2);
      if (m < n1 && n < n2) E += c * sq[m + 1] * sq[n + 1] * a(m + 1, n + 1);
      if (m < n1 && n >= 1) F += c * sq[m + 1] * sq[n] * a(m + 1, n - 1);
    }
  }

  Moments out;
  out.mean << 2.0 * a1.real(), 2.0 * a1.imag(), 2.0 * a2.real(),
      2.0 * a2.imag();

  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(0, 0) = 1.0 + 2.0 * nn1 + 2.0 * s1.real();
  M(1, 1) = 1.0 + 2.0 * nn1 - 2.0 * s1.real();
  M(0, 1) = M(1, 0) = 2.0 * s1.imag();
  M(2, 2) = 1.0 + 2.0 * nn2 + 2.0 * s2.real();
  M(3, 3) = 1.0 + 2.0 * nn2 - 2.0 * s2.real();
  M(2, 3) = M(3, 2) = 2.0 * s2.imag();
  M(0, 2) = M(2, 0) = 2.0 * (E.real() + F.real());
  M(1, 3) = M(3, 1) = 2.0 * (F.real() - E.real());
  M(0, 3) = M(3, 0) = 2.0 * (E.imag() - F.imag());
  M(1, 2) = M(2, 1) = 2.0 * (E.imag() + F.imag());

  out.cov.m = M - out.mean * out.mean.transpose();
  return out;
}

int seed_cutoff(double V, double d, const CutoffPolicy& policy) {
  const double r = squeeze_parameter(V);
  const double lam = std::tanh(r);
  const double beta = effective_displacement(V, d);
  const double n_th = std::sinh(r) * std::sinh(r);
  const double nbar = n_th + beta * beta;
  const double var = n_th * (n_th + 1.0) + beta * beta * V;
  int n = static_cast<int>(std::ceil(nbar + 8.0 * std::sqrt(var))) + 20;
  // The displaced squeezer tail decays like lam^n with a displacement-driven
  // sqrt(n) slowdown; pad by the photons needed to push that tail below the
  // covariance accuracy floor (measured effective rate ~ ln(lam^2)/2).
  if (lam > 0.0 && beta > 0.0) {
    n += static_cast<int>(std::ceil(30.0 / (-2.0 * std::log(lam))));
  }
  n = std::max(n, diag_tail_bound(lam, kTmsvTailTol) + 10);
  return std::max(policy.step, round_up_to(n, policy.step));
}

namespace {

using Quantities = std::array<double, 17>;

// p_sps (1 for non-SPS families) followed by the 16 covariance entries.
Quantities cutoff_quantities(const StateSpec& spec, int n) {
  Quantities q{};
  FockAmplitudes state = build_tmsc(spec.V, spec.d, n, n);
  double p = 1.0;
  TwoModeCovariance cov;
  if (spec.has_sps()) {
    SubtractionResult sub = subtract_photon(state, spec.Ts);
    p = sub.p_sps;
    cov = moments(sub.state).cov;
  } else {
    cov = moments(state).cov;
  }
  q[0] = p;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) q[1 + 4 * i + j] = cov.m(i, j);
  return q;
}

}  // namespace

std::pair<int, int> resolve_cutoff(const StateSpec& spec, double tol,
                                   const CutoffPolicy& policy) {
  spec.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("resolve_cutoff: tol <= 0");
  const int step = policy.step;

  std::map<int, std::optional<Quantities>> cache;
  auto eval = [&](int n) -> const std::optional<Quantities>& {
    auto it = cache.find(n);
    if (it == cache.end()) {
      std::optional<Quantities> q;
      try {
        q = cutoff_quantities(spec, n);
      } catch (const CutoffError&) {
        q = std::nullopt;  // too small; treated as unstable
      }
      it = cache.emplace(n, std::move(q)).first;
    }
    return it->second;
  };
  // Stability demands half the caller tolerance: with a geometric tail the
  // distance to the converged value is comparable to one step's change, so
  // the margin keeps the absolute error within tol.
  auto stable = [&](int n) {
    const auto& a = eval(n);
    if (!a) return false;
    const auto& b = eval(n + step);
    if (!b) return false;
    double change = 0.0;
    for (std::size_t i = 0; i < a->size(); ++i) {
      change = std::max(change, std::abs((*a)[i] - (*b)[i]));
    }
    return change < 0.5 * tol;
  };

  const double r = squeeze_parameter(spec.V);
  const double beta = effective_displacement(spec.V, spec.d);
  const double nbar = std::sinh(r) * std::sinh(r) + beta * beta;
  auto cap_error = [&](int n) {
    std::ostringstream msg;
    msg << "resolve_cutoff: cutoff " << n << " exceeds hard cap "
        << policy.hard_cap << " (estimated mean photon number " << nbar
        << " per mode)";
    return CutoffCapError(msg.str(), nbar);
  };

  int n = seed_cutoff(spec.V, spec.d, policy);
  if (n > policy.hard_cap) throw cap_error(n);
  while (!stable(n)) {
    n += std::max(step, round_up_to(n / 4, step));
    if (n > policy.hard_cap) throw cap_error(n);
  }

  // Smallest stable multiple of `step`; stability is monotone because the
  // truncated tails shrink with the cutoff.
  int lo = 1, hi = n / step;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (stable(mid * step)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return {lo * step, lo * step};
}

}  // namespace cvmdi
