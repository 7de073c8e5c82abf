#include "cvmdi/fock_reference.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

#include "cvmdi/errors.hpp"

namespace cvmdi::reference {

namespace {

Eigen::MatrixXd annihilation(int cutoff) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

}  // namespace

Eigen::MatrixXd displacement_matrix_expm(double alpha, int cutoff) {
  const Eigen::MatrixXd a = annihilation(cutoff);
  const Eigen::MatrixXd gen = alpha * (a.transpose() - a);
  return gen.exp();
}

FockAmplitudes tmsc_via_displacement_matrices(double V, double d,
                                              int n1_cutoff, int n2_cutoff) {
  const double r = squeeze_parameter(V);
  const double lam = std::tanh(r);
  const double beta = effective_displacement(V, d);
  const int k_max = std::min(n1_cutoff, n2_cutoff);
  Eigen::VectorXd diag(k_max + 1);
  const double pref = std::sqrt(1.0 - lam * lam);
  double pw = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    diag(k) = pref * pw;
    pw *= lam;
  }
  const Eigen::MatrixXd D1 = displacement_matrix(beta, n1_cutoff + 1, k_max + 1);
  const Eigen::MatrixXd D2 =
      (n2_cutoff == n1_cutoff)
          ? D1
          : displacement_matrix(beta, n2_cutoff + 1, k_max + 1);
  FockAmplitudes out;
  out.n1_cutoff = n1_cutoff;
  out.n2_cutoff = n2_cutoff;
  const Eigen::MatrixXd grid = (D1 * diag.asDiagonal()) * D2.transpose();
  out.amp = grid.cast<std::complex<double>>();
  out.norm_sq = out.amp.squaredNorm();
  return out;
}

FockAmplitudes squeeze_displaced_vacuum_expm(double V, double alpha,
                                             int cutoff) {
  if (!(V >= 1.0)) throw std::invalid_argument("V must be >= 1");
  const double r = squeeze_parameter(V);
  const int dim = cutoff + 1;

  const Eigen::MatrixXd D = displacement_matrix_expm(alpha, cutoff);
  Eigen::VectorXd displaced_vac = D.col(0);

  const Eigen::MatrixXd a = annihilation(cutoff);
  const Eigen::MatrixXd ad = a.transpose();
  const Eigen::MatrixXd gen = r * (kron(ad, ad) - kron(a, a));
  const Eigen::MatrixXd S = gen.exp();

  Eigen::VectorXd joint = kron(displaced_vac, displaced_vac);
  joint = S * joint;

  FockAmplitudes out;
  out.n1_cutoff = cutoff;
  out.n2_cutoff = cutoff;
  out.amp = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) out.amp(m, n) = joint(m * dim + n);
  out.norm_sq = out.amp.squaredNorm();
  return out;
}

SubtractionResult subtract_photon_beamsplitter(const FockAmplitudes& state,
                                               double Ts) {
  return subtract_photon_beamsplitter_expm(state, Ts);
}

SubtractionResult subtract_photon_beamsplitter_expm(
    const FockAmplitudes& state, double Ts) {
  if (!(Ts >= 0.0 && Ts <= 1.0)) {
    throw std::invalid_argument("Ts must lie in [0, 1]");
  }
  const int n1 = state.n1_cutoff, n2 = state.n2_cutoff;
  const int dim = n2 + 1;  // ancilla cutoff matches mode 2; the generator
                           // conserves total photon number so no leakage
  // Orientation with <1_v| B |n, 0_v> = +sqrt(n) Ts^{(n-1)/2} sqrt(1-Ts),
  // matching the Kraus operator's sign convention.
  const double theta = std::acos(std::sqrt(Ts));
  const Eigen::MatrixXd b = annihilation(n2);
  const Eigen::MatrixXd bd = b.transpose();
  const Eigen::MatrixXd gen = theta * (kron(b, bd) - kron(bd, b));
  const Eigen::MatrixXd B = gen.exp();

  SubtractionResult res;
  res.state.n1_cutoff = n1;
  res.state.n2_cutoff = n2;
  res.state.amp = Eigen::MatrixXcd::Zero(n1 + 1, n2 + 1);
  Eigen::VectorXcd joint(dim * dim);
  for (int row = 0; row <= n1; ++row) {
    joint.setZero();
    for (int n = 0; n <= n2; ++n) joint(n * dim + 0) = state.amp(row, n);
    const Eigen::VectorXcd mixed = B * joint;
    for (int m = 0; m <= n2; ++m) res.state.amp(row, m) = mixed(m * dim + 1);
  }
  const double p = res.state.amp.squaredNorm();
  if (p < 1e-15) {
    std::ostringstream msg;
    msg << "beamsplitter reference: heralding probability " << p
        << " vanishes";
    throw PostSelectionError(msg.str(), p);
  }
  res.p_sps = p;
  res.state.amp /= std::sqrt(p);
  res.state.norm_sq = res.state.amp.squaredNorm();
  return res;
}

}  // namespace cvmdi::reference
