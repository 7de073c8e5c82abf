#include "cvmdi/keyrate.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "cvmdi/errors.hpp"
#include "cvmdi/fock.hpp"

namespace cvmdi {

TwoModeCovariance propagate(const TwoModeCovariance& cov_source,
                            const OneWayChannel& ch) {
  const double T = ch.T;
  if (!(T >= 0.0)) throw std::invalid_argument("propagate: T must be >= 0");
  const double root_t = std::sqrt(T);
  TwoModeCovariance out = cov_source;
  out.m.block<2, 2>(0, 2) *= root_t;
  out.m.block<2, 2>(2, 0) *= root_t;
  // T (Sigma_B + chi_ch I) written as T Sigma_B + (1-T) I + T eps_th I so the
  // g -> 0 boundary (T = 0, chi_ch infinite) stays finite.
  out.m.block<2, 2>(2, 2) = T * cov_source.m.block<2, 2>(2, 2) +
                            ((1.0 - T) + T * ch.eps_th) *
                                Eigen::Matrix2d::Identity();
  return out;
}

HolevoResult holevo_bound(const TwoModeCovariance& cov_after) {
  const SymplecticPair nu = symplectic_eigenvalues(cov_after);
  const Eigen::Matrix2d cond = heterodyne_condition(cov_after);
  HolevoResult res;
  res.nu1 = nu.nu1;
  res.nu2 = nu.nu2;
  res.nu3 = std::sqrt(cond(0, 0) * cond(1, 1));
  res.chi_BE = entropy_g(res.nu1) + entropy_g(res.nu2) - entropy_g(res.nu3);
  assert(res.chi_BE >= -1e-9);
  return res;
}

namespace {

// Members ordered so the struct carries no padding: byte-wise hashing and
// comparison then see only value bits.
struct SourceKey {
  double V, d, Ts, tol;
  int family;
  int search;

  bool operator==(const SourceKey& o) const {
    return std::memcmp(this, &o, sizeof(SourceKey)) == 0;
  }
};
static_assert(sizeof(SourceKey) == 4 * sizeof(double) + 2 * sizeof(int));

struct SourceKeyHash {
  std::size_t operator()(const SourceKey& k) const {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(&k);
    std::size_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < sizeof(SourceKey); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
    return h;
  }
};

std::mutex g_cache_mutex;
std::unordered_map<SourceKey, SourceState, SourceKeyHash>& cache_map() {
  static std::unordered_map<SourceKey, SourceState, SourceKeyHash> cache;
  return cache;
}

SourceState compute_source(const StateSpec& spec, const EvalOptions& opts) {
  SourceState src;
  if (!spec.has_sps()) {
    // Displacement shifts means only; the covariance pipeline sees the
    // analytic TMSV matrix and a unit heralding probability.
    src.cov = tmsv_covariance(spec.V);
    src.p_sps = 1.0;
    return src;
  }
  int n;
  if (opts.cutoff_search) {
    CutoffPolicy policy;
    policy.hard_cap = opts.cutoff_cap;
    n = resolve_cutoff(spec, opts.cutoff_tol, policy).first;
  } else {
    n = seed_cutoff(spec.V, spec.d);
    if (n > opts.cutoff_cap) {
      const double r = squeeze_parameter(spec.V);
      const double beta = effective_displacement(spec.V, spec.d);
      const double nbar = std::sinh(r) * std::sinh(r) + beta * beta;
      std::ostringstream msg;
      msg << "source_state: cutoff " << n << " exceeds hard cap "
          << opts.cutoff_cap << " (estimated mean photon number " << nbar
          << " per mode)";
      throw CutoffCapError(msg.str(), nbar);
    }
  }
  const FockAmplitudes state = build_tmsc(spec.V, spec.d, n, n);
  const SubtractionResult sub = subtract_photon(state, spec.Ts);
  src.cov = moments(sub.state).cov;
  src.p_sps = sub.p_sps;
  return src;
}

}  // namespace

SourceState source_state(const StateSpec& spec, const EvalOptions& opts) {
  spec.validate();
  if (!spec.has_sps() || !opts.use_cache) return compute_source(spec, opts);
  const SourceKey key{spec.V, spec.d, spec.Ts, opts.cutoff_tol,
                      static_cast<int>(spec.family),
                      opts.cutoff_search ? 1 : 0};
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = cache_map().find(key);
    if (it != cache_map().end()) return it->second;
  }
  SourceState src = compute_source(spec, opts);
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    cache_map().emplace(key, src);
  }
  return src;
}

void clear_source_cache() {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  cache_map().clear();
}

void warm_source_cache(StateFamily family, double V, double d,
                       const std::vector<double>& ts_list,
                       const EvalOptions& opts) {
  if (!family_has_sps(family) || !opts.use_cache || opts.cutoff_search) return;
  const int n = seed_cutoff(V, d);
  if (n > opts.cutoff_cap) return;  // evaluation will raise the error
  FockAmplitudes state;
  try {
    state = build_tmsc(V, d, n, n);
  } catch (const CutoffError&) {
    return;
  }
  for (double ts : ts_list) {
    const SourceKey key{V, d, ts, opts.cutoff_tol, static_cast<int>(family),
                        0};
    {
      std::lock_guard<std::mutex> lock(g_cache_mutex);
      if (cache_map().count(key)) continue;
    }
    SourceState src;
    try {
      const SubtractionResult sub = subtract_photon(state, ts);
      src.cov = moments(sub.state).cov;
      src.p_sps = sub.p_sps;
    } catch (const PostSelectionError&) {
      continue;
    }
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    cache_map().emplace(key, src);
  }
}

namespace {

KeyRateBreakdown evaluate_with_channel(const SourceState& src,
                                       const LinkBudget& link,
                                       const OneWayChannel& ch) {
  KeyRateBreakdown out;
  out.p_sps = src.p_sps;
  out.cov_source = src.cov;
  out.channel = ch;
  out.cov_after = propagate(src.cov, ch);
  out.I_AB = mutual_information(out.cov_after);
  const HolevoResult h = holevo_bound(out.cov_after);
  out.chi_BE = h.chi_BE;
  out.nu1 = h.nu1;
  out.nu2 = h.nu2;
  out.nu3 = h.nu3;
  out.K = out.p_sps * (link.beta * out.I_AB - out.chi_BE);
  return out;
}

}  // namespace

KeyRateBreakdown secret_key_rate(const StateSpec& spec, const LinkBudget& link,
                                 const GainSpec& gain,
                                 const EvalOptions& opts) {
  spec.validate();
  link.validate();
  const SourceState src = source_state(spec, opts);

  if (gain.mode != GainMode::Numeric) {
    const OneWayChannel ch = one_way_reduce(link, spec.V, gain);
    return evaluate_with_channel(src, link, ch);
  }

  // Numeric gain: bounded golden-section maximization of K over g. The K(g)
  // profile is smooth and unimodal between the vanishing-gain and T = 1
  // boundaries; a coarse bracket guards against flat shoulders.
  const double T_A =
      transmissivity_from_distance(link.L_AC_km, link.w_db_per_km);
  const double g_hi = std::sqrt(2.0 / T_A) * (1.0 - 1e-12);
  const double g_lo = 1e-6;
  auto k_of = [&](double g) {
    const OneWayChannel ch = one_way_reduce(link, spec.V, {GainMode::Fixed, g});
    return evaluate_with_channel(src, link, ch).K;
  };

  const int coarse = 48;
  double best_g = g_lo, best_k = k_of(g_lo);
  for (int i = 1; i <= coarse; ++i) {
    const double g = g_lo + (g_hi - g_lo) * double(i) / coarse;
    const double k = k_of(g);
    if (k > best_k) {
      best_k = k;
      best_g = g;
    }
  }
  double a = std::max(g_lo, best_g - (g_hi - g_lo) / coarse);
  double b = std::min(g_hi, best_g + (g_hi - g_lo) / coarse);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = k_of(x1), f2 = k_of(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, b); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = k_of(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = k_of(x1);
    }
  }
  const double g_star = 0.5 * (a + b);
  const OneWayChannel ch =
      one_way_reduce(link, spec.V, {GainMode::Fixed, g_star});
  return evaluate_with_channel(src, link, ch);
}

}  // namespace cvmdi
