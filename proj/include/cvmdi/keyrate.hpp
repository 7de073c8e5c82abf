#pragma once

#include <vector>

#include "cvmdi/channel.hpp"
#include "cvmdi/gaussian.hpp"
#include "cvmdi/state.hpp"

namespace cvmdi {

/// Everything a single key-rate evaluation produces.
struct KeyRateBreakdown {
  double p_sps = 1.0;
  double I_AB = 0.0;    // bits
  double chi_BE = 0.0;  // bits
  double K = 0.0;       // bits per use, reported raw (may be negative)
  double nu1 = 1.0, nu2 = 1.0, nu3 = 1.0;
  TwoModeCovariance cov_source;
  TwoModeCovariance cov_after;
  OneWayChannel channel;
};

/// Channel action on the source covariance: mode-1 block unchanged, cross
/// correlations scaled by sqrt(T), mode-2 diagonal mapped to
/// T(V_B + chi_ch) = T V_B + (1-T) + T eps_th (the second form avoids the
/// T -> 0 singularity of chi_ch).
TwoModeCovariance propagate(const TwoModeCovariance& cov_source,
                            const OneWayChannel& ch);

struct HolevoResult {
  double chi_BE = 0.0;
  double nu1 = 1.0, nu2 = 1.0, nu3 = 1.0;
};

/// chi_BE = g(nu1) + g(nu2) - g(nu3) with (nu1, nu2) the symplectic
/// spectrum of the propagated covariance and nu3 the symplectic eigenvalue
/// of the heterodyne-conditioned single-mode covariance.
HolevoResult holevo_bound(const TwoModeCovariance& cov_after);

struct EvalOptions {
  double cutoff_tol = 1e-8;
  int cutoff_cap = 4096;
  bool cutoff_search = false;  // true: resolve_cutoff; false: seed heuristic
  bool use_cache = true;       // memoize (family,V,d,Ts) -> (cov, p_sps)
};

struct SourceState {
  TwoModeCovariance cov;
  double p_sps = 1.0;
};

/// Source covariance and heralding probability for a state spec. Non-SPS
/// families use the analytic TMSV covariance (p_sps = 1); SPS families run
/// the Fock engine. Results are memoized process-wide when
/// opts.use_cache is set.
SourceState source_state(const StateSpec& spec, const EvalOptions& opts = {});

void clear_source_cache();

/// Populate the source cache for a whole Ts sweep at one (V, d): the Fock
/// state is built once and every heralded slice is derived from it, exactly
/// as source_state would compute it. No-op for non-SPS families, when the
/// cache is disabled, or when the cutoff search is requested (its cutoffs
/// depend on Ts).
void warm_source_cache(StateFamily family, double V, double d,
                       const std::vector<double>& ts_list,
                       const EvalOptions& opts = {});

/// K = p_sps (beta I_AB - chi_BE) for the full pipeline
/// source -> one-way reduction -> propagation -> information quantities.
/// GainMode::Numeric maximizes K over the gain by golden-section search.
KeyRateBreakdown secret_key_rate(const StateSpec& spec, const LinkBudget& link,
                                 const GainSpec& gain = {},
                                 const EvalOptions& opts = {});

}  // namespace cvmdi
