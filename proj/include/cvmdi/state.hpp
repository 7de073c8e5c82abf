#pragma once

#include <cmath>
#include <string>

namespace cvmdi {

/// Resource-state family prepared by Alice. The SPS variants apply a
/// single-photon subtraction (beamsplitter T_S + one-photon heralding)
/// on the mode that travels to the relay.
enum class StateFamily { Tmsv, SpsTmsv, Tmsc, SpsTmsc };

std::string to_string(StateFamily f);
StateFamily family_from_string(const std::string& s);

inline bool family_has_sps(StateFamily f) {
  return f == StateFamily::SpsTmsv || f == StateFamily::SpsTmsc;
}
inline bool family_has_displacement(StateFamily f) {
  return f == StateFamily::Tmsc || f == StateFamily::SpsTmsc;
}

/// Resource-state parameters. V is the quadrature variance in shot-noise
/// units (V = cosh 2r >= 1); d is the displacement parameter, each mode's
/// q-mean is shifted by d before squeezing; Ts is the SPS beamsplitter
/// transmissivity, only meaningful for SPS families.
struct StateSpec {
  StateFamily family = StateFamily::Tmsv;
  double V = 1.0;
  double d = 0.0;
  double Ts = 0.0;

  bool has_sps() const { return family_has_sps(family); }
  bool has_displacement() const { return family_has_displacement(family); }

  /// Throws std::invalid_argument on violated family constraints.
  void validate() const;
};

inline double squeeze_parameter(double V) { return 0.5 * std::acosh(V); }

/// Post-squeezer per-mode displacement amplitude. Each mode's q-quadrature
/// mean is shifted by d before squeezing (coherent amplitude d/2), and the
/// two-mode squeezer amplifies real displacements by e^r, so the prepared
/// state is D1(b)D2(b) S12(r)|00> with b = (d/2) e^r and <q_i> = d e^r.
inline double effective_displacement(double V, double d) {
  return 0.5 * d * std::exp(squeeze_parameter(V));
}

}  // namespace cvmdi
