#include "cvmdi/state.hpp"

#include <stdexcept>

namespace cvmdi {

std::string to_string(StateFamily f) {
  switch (f) {
    case StateFamily::Tmsv: return "tmsv";
    case StateFamily::SpsTmsv: return "sps-tmsv";
    case StateFamily::Tmsc: return "tmsc";
    case StateFamily::SpsTmsc: return "sps-tmsc";
  }
  throw std::invalid_argument("unknown StateFamily");
}

StateFamily family_from_string(const std::string& s) {
  if (s == "tmsv") return StateFamily::Tmsv;
  if (s == "sps-tmsv") return StateFamily::SpsTmsv;
  if (s == "tmsc") return StateFamily::Tmsc;
  if (s == "sps-tmsc") return StateFamily::SpsTmsc;
  throw std::invalid_argument("unknown state family '" + s +
                              "' (expected tmsv, sps-tmsv, tmsc, sps-tmsc)");
}

void StateSpec::validate() const {
  if (!(V >= 1.0)) {
    throw std::invalid_argument("state variance must satisfy V >= 1, got " +
                                std::to_string(V));
  }
  if (!(d >= 0.0)) {
    throw std::invalid_argument("displacement must satisfy d >= 0, got " +
                                std::to_string(d));
  }
  if (!has_displacement() && d != 0.0) {
    throw std::invalid_argument("family " + to_string(family) +
                                " requires d = 0");
  }
  if (has_sps() && !(Ts >= 0.0 && Ts <= 1.0)) {
    throw std::invalid_argument("SPS transmissivity must lie in [0, 1], got " +
                                std::to_string(Ts));
  }
}

}  // namespace cvmdi
