#pragma once

#include <Eigen/Dense>

#include "cvmdi/fock.hpp"

// Reference constructions via truncated operator exponentials and the
// explicit beamsplitter decomposition. Slow and small-cutoff only; they
// exist to validate the production routes (selfcheck and tests), never as
// a production path.

namespace cvmdi::reference {

/// <m|exp(alpha (a^dag - a))|n> from the dense matrix exponential of the
/// truncated generator.
Eigen::MatrixXd displacement_matrix_expm(double alpha, int cutoff);

/// Squeezer diagonal displaced per mode by the single-mode displacement
/// matrix: D(beta) diag(sqrt(1-lam^2) lam^k) D(beta)^T. Independent of the
/// production recurrence; agrees with build_tmsc on every entry.
FockAmplitudes tmsc_via_displacement_matrices(double V, double d,
                                              int n1_cutoff, int n2_cutoff);

/// S12(r) D1(alpha) D2(alpha)|00> evaluated literally: displaced vacuum
/// product state, then the dense exponential of the truncated two-mode
/// squeezer generator r(a1+ a2+ - a1 a2). Entries near the cutoff corner
/// carry truncation artifacts; compare on an interior block.
FockAmplitudes squeeze_displaced_vacuum_expm(double V, double alpha, int cutoff);

/// Explicit three-mode single-photon subtraction: mix mode 2 with a vacuum
/// ancilla on a transmissivity-Ts beamsplitter (binomial SU(2) action) and
/// project the ancilla onto |1>.
SubtractionResult subtract_photon_beamsplitter(const FockAmplitudes& state,
                                               double Ts);

/// Same, but with the beamsplitter applied as a dense matrix exponential
/// of theta (b^dag v - b v^dag) on the joint (mode2 x ancilla) space.
SubtractionResult subtract_photon_beamsplitter_expm(const FockAmplitudes& state,
                                                    double Ts);

}  // namespace cvmdi::reference
