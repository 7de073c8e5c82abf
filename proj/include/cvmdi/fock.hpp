#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "cvmdi/gaussian.hpp"
#include "cvmdi/state.hpp"

namespace cvmdi {

/// Truncated two-mode pure state: amp(n1, n2) = <n1, n2|psi> for
/// n_i <= n_i_cutoff, zero-filled beyond. norm_sq tracks the squared
/// 2-norm; states returned by the builders are renormalized and satisfy
/// |norm_sq - 1| <= 1e-9.
struct FockAmplitudes {
  int n1_cutoff = 0;
  int n2_cutoff = 0;
  Eigen::MatrixXcd amp;  // (n1_cutoff+1) x (n2_cutoff+1)
  double norm_sq = 0.0;

  bool is_normalized() const { return std::abs(norm_sq - 1.0) <= 1e-9; }
  double compute_norm_sq() const { return amp.squaredNorm(); }
};

/// Single-mode displacement matrix <m|D(alpha)|n> for real alpha,
/// m <= rows-1, n <= cols-1, built by the stable two-term column
/// recurrence sqrt(n) D(m,n) = sqrt(m) D(m-1,n-1) - alpha D(m,n-1).
Eigen::MatrixXd displacement_matrix(double alpha, int rows, int cols);

/// Two-mode squeezed coherent state D1(b)D2(b) S12(r)|00> with
/// r = arccosh(V)/2 and b = effective_displacement(V, d): the squeezer
/// diagonal sqrt(1-lam^2) lam^n |n,n> displaced per mode by the single-mode
/// displacement matrix. Throws CutoffError (naming the offending mode) if
/// the squeezer tail mass beyond the cutoffs exceeds 1e-10 or the
/// constructed norm deviates from 1 by more than 1e-6.
FockAmplitudes build_tmsc(double V, double d, int n1_cutoff, int n2_cutoff);

struct SubtractionResult {
  FockAmplitudes state;  // renormalized heralded state
  double p_sps = 0.0;    // heralding probability
};

/// Single-photon subtraction on mode 2: Kraus M1 = sqrt(1-Ts) Ts^{n/2} a,
/// equivalent to a transmissivity-Ts beamsplitter with a vacuum ancilla
/// and a one-photon detection on the reflected port. Throws
/// PostSelectionError when p_sps < 1e-15 (Ts = 1, or vacuum input).
SubtractionResult subtract_photon(const FockAmplitudes& state, double Ts);

struct Moments {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();  // (q1, p1, q2, p2)
  TwoModeCovariance cov;
};

/// Mean vector and symmetrized covariance in the q = a + a^dag convention
/// (vacuum variance 1).
Moments moments(const FockAmplitudes& state);

struct CutoffPolicy {
  int hard_cap = 4096;   // per mode
  int step = 10;         // search granularity
};

/// Heuristic cutoff that keeps the displaced-thermal photon distribution
/// tail and the squeezer diagonal tail negligible: nbar + 8 sigma + 20
/// rounded up to a multiple of 10.
int seed_cutoff(double V, double d, const CutoffPolicy& policy = {});

/// Smallest cutoffs (in steps of 10) at which p_sps and every covariance
/// entry move by less than tol when both cutoffs grow by 10. Searched by
/// bisection between 10 and the first stable seed. Throws CutoffCapError
/// if the search would pass the hard cap.
std::pair<int, int> resolve_cutoff(const StateSpec& spec, double tol,
                                   const CutoffPolicy& policy = {});

}  // namespace cvmdi
