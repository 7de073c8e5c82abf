#pragma once

#include <Eigen/Dense>

namespace cvmdi {

/// 4x4 real symmetric covariance matrix of a two-mode Gaussian (or
/// Gaussian-extremality-reduced) state in (q1, p1, q2, p2) ordering with
/// vacuum variance 1. All states produced here have vanishing q-p cross
/// entries, so the matrix carries six independent numbers: the mode
/// diagonals and the q/p cross-correlations.
struct TwoModeCovariance {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

  double mode1_q() const { return m(0, 0); }
  double mode1_p() const { return m(1, 1); }
  double mode2_q() const { return m(2, 2); }
  double mode2_p() const { return m(3, 3); }
  double cross_q() const { return m(0, 2); }
  double cross_p() const { return m(1, 3); }

  /// Largest asymmetry |m - m^T|.
  double symmetry_defect() const;
  /// Largest q-p mixing entry, zero for the supported block structure.
  double block_defect() const;
};

/// Analytic TMSV covariance: diag V with cross-correlations +-sqrt(V^2-1).
TwoModeCovariance tmsv_covariance(double V);

struct SymplecticPair {
  double nu1 = 1.0;  // >= nu2
  double nu2 = 1.0;
};

/// Symplectic spectrum via the closed form for q-p block covariances
/// (invariants I1 = d1 d2, I2 = m1 m2, I3 = k1 k2,
/// I4 = (d1 m1 - k1^2)(d2 m2 - k2^2)). Rejects matrices whose q-p mixing
/// exceeds 1e-8 with StructureError; throws NumericError if the
/// discriminant is below -1e-10.
SymplecticPair symplectic_eigenvalues(const TwoModeCovariance& cov);

/// Generic route |eig(i Omega Sigma)|; needs no block structure. Used as
/// the independent cross-check of the closed form.
SymplecticPair symplectic_eigenvalues_generic(const TwoModeCovariance& cov);

/// Gaussian von Neumann entropy kernel in bits:
/// g(nu) = ((nu+1)/2) log2((nu+1)/2) - ((nu-1)/2) log2((nu-1)/2).
/// Values in [1 - 1e-9, 1] are clamped to 1 (g = 0); smaller values raise
/// UnphysicalStateError.
double entropy_g(double nu);

/// S(rho) = g(nu1) + g(nu2) for the two-mode covariance.
double von_neumann_entropy(const TwoModeCovariance& cov);

/// Conditional covariance of mode 1 after heterodyning mode 2:
/// Sigma_A - Sigma_C (Sigma_B + I)^{-1} Sigma_C^T, which for the block
/// structure is diag(d1 - k1^2/(m1+1), d2 - k2^2/(m2+1)).
Eigen::Matrix2d heterodyne_condition(const TwoModeCovariance& cov);

/// Classical mutual information (bits) of the double-heterodyne readout:
/// 1/2 log2((d_q+1)/(cond_q+1)) + 1/2 log2((d_p+1)/(cond_p+1)).
double mutual_information(const TwoModeCovariance& cov);

}  // namespace cvmdi
