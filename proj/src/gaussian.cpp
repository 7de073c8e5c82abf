#include "cvmdi/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvmdi/errors.hpp"

namespace cvmdi {

namespace {

constexpr double kStructureTol = 1e-8;
constexpr double kNuClampBand = 1e-9;

// Two-mode symplectic form in (q1, p1, q2, p2) ordering.
Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  return omega;
}

}  // namespace

double TwoModeCovariance::symmetry_defect() const {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double TwoModeCovariance::block_defect() const {
  double defect = 0.0;
  // q-p mixing entries: (0,1), (0,3), (1,2), (2,3) and transposes.
  for (auto [i, j] : {std::pair{0, 1}, {0, 3}, {1, 2}, {2, 3}}) {
    defect = std::max(defect, std::abs(m(i, j)));
    defect = std::max(defect, std::abs(m(j, i)));
  }
  return defect;
}

TwoModeCovariance tmsv_covariance(double V) {
  if (!(V >= 1.0)) {
    throw std::invalid_argument("tmsv_covariance: V must be >= 1");
  }
  const double c = std::sqrt(V * V - 1.0);
  TwoModeCovariance cov;
  cov.m.setZero();
  cov.m(0, 0) = cov.m(1, 1) = cov.m(2, 2) = cov.m(3, 3) = V;
  cov.m(0, 2) = cov.m(2, 0) = c;
  cov.m(1, 3) = cov.m(3, 1) = -c;
  return cov;
}

SymplecticPair symplectic_eigenvalues(const TwoModeCovariance& cov) {
  const double mixing = cov.block_defect();
  if (mixing > kStructureTol) {
    std::ostringstream msg;
    msg << "covariance violates the q-p block structure (mixing " << mixing
        << " > " << kStructureTol << ")";
    throw StructureError(msg.str());
  }
  const double d1 = cov.mode1_q(), d2 = cov.mode1_p();
  const double m1 = cov.mode2_q(), m2 = cov.mode2_p();
  const double k1 = cov.cross_q(), k2 = cov.cross_p();

  const double I1 = d1 * d2;
  const double I2 = m1 * m2;
  const double I3 = k1 * k2;
  const double I4 = (d1 * m1 - k1 * k1) * (d2 * m2 - k2 * k2);
  const double s = I1 + I2 + 2.0 * I3;
  double disc = s * s - 4.0 * I4;
  if (disc < -1e-10) {
    std::ostringstream msg;
    msg << "negative symplectic discriminant " << disc;
    throw NumericError(msg.str());
  }
  // A discriminant below its own rounding floor means nu1 = nu2 to working
  // precision; taking the raw square root there would split the pair by
  // ~sqrt(eps) and push pure states outside the clamp band.
  constexpr double kEps = 2.220446049250313e-16;
  if (disc < 64.0 * kEps * s * s) disc = 0.0;
  const double root = std::sqrt(disc);
  SymplecticPair nu;
  nu.nu1 = std::sqrt(std::max(0.0, 0.5 * (s + root)));
  // (s - root)/2 written as 2 I4 / (s + root): exact algebra, no
  // cancellation when root approaches s.
  nu.nu2 = (s + root > 0.0)
               ? std::sqrt(std::max(0.0, 2.0 * I4 / (s + root)))
               : 0.0;
  if (nu.nu2 > nu.nu1) std::swap(nu.nu1, nu.nu2);

#ifndef NDEBUG
  const SymplecticPair ref = symplectic_eigenvalues_generic(cov);
  const double scale = std::max(1.0, nu.nu1);
  if (std::abs(nu.nu1 - ref.nu1) > 1e-7 * scale ||
      std::abs(nu.nu2 - ref.nu2) > 1e-7 * scale) {
    std::ostringstream msg;
    msg << "closed-form symplectic spectrum (" << nu.nu1 << ", " << nu.nu2
        << ") disagrees with |eig(i Omega Sigma)| (" << ref.nu1 << ", "
        << ref.nu2 << ")";
    throw NumericError(msg.str());
  }
#endif
  return nu;
}

SymplecticPair symplectic_eigenvalues_generic(const TwoModeCovariance& cov) {
  const Eigen::Matrix4d product = symplectic_form() * cov.m;
  Eigen::EigenSolver<Eigen::Matrix4d> solver(product, false);
  std::array<double, 4> mods{};
  for (int i = 0; i < 4; ++i) mods[i] = std::abs(solver.eigenvalues()(i));
  std::sort(mods.begin(), mods.end(), std::greater<>());
  // Moduli come in pairs {nu1, nu1, nu2, nu2}.
  return SymplecticPair{mods[0], mods[2]};
}

double entropy_g(double nu) {
  if (nu < 1.0 - kNuClampBand) {
    std::ostringstream msg;
    msg << "symplectic eigenvalue " << nu << " below 1 (unphysical)";
    throw UnphysicalStateError(msg.str());
  }
  if (nu <= 1.0 + kNuClampBand) return 0.0;  // clamp band, g(1) = 0 exactly
  const double a = 0.5 * (nu + 1.0);
  const double b = 0.5 * (nu - 1.0);
  return a * std::log2(a) - b * std::log2(b);
}

double von_neumann_entropy(const TwoModeCovariance& cov) {
  const SymplecticPair nu = symplectic_eigenvalues(cov);
  return entropy_g(nu.nu1) + entropy_g(nu.nu2);
}

Eigen::Matrix2d heterodyne_condition(const TwoModeCovariance& cov) {
  const double m1 = cov.mode2_q(), m2 = cov.mode2_p();
  if (m1 + 1.0 <= 0.0 || m2 + 1.0 <= 0.0) {
    throw UnphysicalStateError(
        "heterodyne_condition: mode-2 variance + 1 is not positive");
  }
  Eigen::Matrix2d cond = Eigen::Matrix2d::Zero();
  cond(0, 0) = cov.mode1_q() - cov.cross_q() * cov.cross_q() / (m1 + 1.0);
  cond(1, 1) = cov.mode1_p() - cov.cross_p() * cov.cross_p() / (m2 + 1.0);
  return cond;
}

double mutual_information(const TwoModeCovariance& cov) {
  const Eigen::Matrix2d cond = heterodyne_condition(cov);
  const double iq =
      0.5 * std::log2((cov.mode1_q() + 1.0) / (cond(0, 0) + 1.0));
  const double ip =
      0.5 * std::log2((cov.mode1_p() + 1.0) / (cond(1, 1) + 1.0));
  return iq + ip;
}

}  // namespace cvmdi
