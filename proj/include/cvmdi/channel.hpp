#pragma once

namespace cvmdi {

/// Physical link parameters and protocol constants. Defaults follow the
/// fiber attenuation 0.16 dB/km, the linear excess-noise fit
/// eps_A = 19.09e-5 + 6.13e-5 * L_AC, eps_B = 19.09e-5, beta = 0.96, and
/// the relay co-located with Bob (L_BC = 0, T_B = 1).
struct LinkBudget {
  double L_AC_km = 0.0;
  double L_BC_km = 0.0;
  double w_db_per_km = 0.16;
  double eps_a0 = 19.09e-5;   // shot-noise units
  double eps_a1 = 6.13e-5;    // shot-noise units per km
  double T_B = 1.0;
  double eps_B = 19.09e-5;
  double beta = 0.96;         // reconciliation efficiency

  void validate() const;  // throws std::invalid_argument
};

/// Equivalent one-way channel of the relay protocol.
struct OneWayChannel {
  double T = 1.0;       // equivalent transmissivity
  double eps_th = 0.0;  // equivalent excess noise
  double chi_ch = 0.0;  // (1-T)/T + eps_th (infinite when T = 0)
  double gain = 0.0;    // displacement gain g
};

/// T_A = 10^{-w L / 10}.
double transmissivity_from_distance(double L_km, double w_db_per_km);

/// Linear excess-noise fit eps = a0 + a1 * L.
double excess_noise_at(double L_km, double a0, double a1);

enum class GainMode {
  LiOptimal,  // g^2 = (2/T_B)(V-1)/(V+1), so T = (T_A/T_B)(V-1)/(V+1)
  Fixed,      // caller supplies g
  Numeric,    // g maximizing K; resolved inside secret_key_rate
};

struct GainSpec {
  GainMode mode = GainMode::LiOptimal;
  double g = 0.0;  // used by Fixed
};

/// Reduce the relay protocol to its equivalent one-way channel:
/// eps_th = (T_B/T_A)(eps_B - 2) + eps_A + 2/T_A with eps_A from the fit,
/// T = (g^2/2) T_A. V_bob is the (Gaussian) variance of Bob's retained
/// mode. GainMode::Numeric is rejected here; the key-rate layer resolves
/// it. Throws ChannelError when T_A underflows to zero.
OneWayChannel one_way_reduce(const LinkBudget& link, double V_bob,
                             const GainSpec& gain = {});

}  // namespace cvmdi
