#include "cvmdi/channel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cvmdi/errors.hpp"

namespace cvmdi {

void LinkBudget::validate() const {
  if (!(L_AC_km >= 0.0))
    throw std::invalid_argument("link: L_AC must be >= 0");
  if (!(L_BC_km >= 0.0))
    throw std::invalid_argument("link: L_BC must be >= 0");
  if (!(w_db_per_km > 0.0))
    throw std::invalid_argument("link: attenuation w must be > 0");
  if (!(T_B > 0.0 && T_B <= 1.0))
    throw std::invalid_argument("link: T_B must lie in (0, 1]");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("link: beta must lie in (0, 1]");
}

double transmissivity_from_distance(double L_km, double w_db_per_km) {
  if (!(L_km >= 0.0)) {
    throw std::invalid_argument("transmissivity_from_distance: L < 0");
  }
  return std::pow(10.0, -w_db_per_km * L_km / 10.0);
}

double excess_noise_at(double L_km, double a0, double a1) {
  if (!(L_km >= 0.0)) {
    throw std::invalid_argument("excess_noise_at: L < 0");
  }
  return a0 + a1 * L_km;
}

OneWayChannel one_way_reduce(const LinkBudget& link, double V_bob,
                             const GainSpec& gain) {
  link.validate();
  if (!(V_bob >= 1.0)) {
    throw std::invalid_argument("one_way_reduce: V_bob must be >= 1");
  }
  if (gain.mode == GainMode::Numeric) {
    throw std::invalid_argument(
        "one_way_reduce: numeric gain is resolved by secret_key_rate");
  }

  const double T_A = transmissivity_from_distance(link.L_AC_km, link.w_db_per_km);
  if (T_A <= 0.0) {
    std::ostringstream msg;
    msg << "one_way_reduce: T_A underflows at L_AC = " << link.L_AC_km
        << " km";
    throw ChannelError(msg.str());
  }
  const double eps_A = excess_noise_at(link.L_AC_km, link.eps_a0, link.eps_a1);

  OneWayChannel ch;
  // (T_B/T_A)(eps_B - 2) + 2/T_A regrouped as (T_B eps_B + 2(1-T_B))/T_A:
  // same algebra, but the T_B = 1 reduction eps_th = eps_A + eps_B/T_A then
  // holds without cancellation.
  ch.eps_th = (link.T_B * link.eps_B + 2.0 * (1.0 - link.T_B)) / T_A + eps_A;
  if (gain.mode == GainMode::Fixed) {
    if (!(gain.g > 0.0)) {
      throw std::invalid_argument("one_way_reduce: fixed gain must be > 0");
    }
    ch.gain = gain.g;
  } else {
    ch.gain = std::sqrt((2.0 / link.T_B) * (V_bob - 1.0) / (V_bob + 1.0));
  }
  ch.T = 0.5 * ch.gain * ch.gain * T_A;
  ch.chi_ch = (ch.T > 0.0)
                  ? (1.0 - ch.T) / ch.T + ch.eps_th
                  : std::numeric_limits<double>::infinity();
  return ch;
}

}  // namespace cvmdi
