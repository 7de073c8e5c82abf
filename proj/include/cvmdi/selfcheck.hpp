#pragma once

#include <string>
#include <vector>

namespace cvmdi {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double millis = 0.0;
};

/// Fast invariant suite: oracle equivalences, symplectic physicality, the
/// algebraic channel identity, and the golden-fixture comparison. The
/// fixtures directory defaults to the source tree's fixtures/.
std::vector<CheckResult> run_selfchecks(const std::string& fixtures_dir = "");

std::string default_fixture_dir();

}  // namespace cvmdi
