#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// Exercises the installed command-line binary end to end. The path is baked
// in by the build so the tests run against the just-built tool.
#ifndef CVMDI_CLI_PATH
#define CVMDI_CLI_PATH "./cvmdi"
#endif

namespace {

struct RunOutput {
  int exit_code = -1;
  std::string stdout_text;
};

RunOutput run_cli(const std::string& args, const std::string& env = "") {
  const std::string out_path = std::string(std::tmpnam(nullptr)) + ".out";
  const std::string cmd = env + std::string(CVMDI_CLI_PATH) + " " + args +
                          " > " + out_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunOutput out;
  out.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out.stdout_text = buffer.str();
  std::remove(out_path.c_str());
  return out;
}

}  // namespace

TEST_CASE("keyrate subcommand emits a JSON breakdown") {
  const RunOutput r = run_cli("keyrate --family tmsv --V 6 --L 50");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("\"P_SPS\": 1.0") != std::string::npos);
  CHECK(r.stdout_text.find("\"K_bits_per_use\": 0.0511613652") !=
        std::string::npos);
}

TEST_CASE("keyrate golden SPS point") {
  const RunOutput r =
      run_cli("keyrate --family sps-tmsc --V 6 --d 5 --Ts 0.99 --L 50");
  CHECK(r.exit_code == 0);
  // P_SPS strictly inside (0, 1); frozen from the independent oracle
  CHECK(r.stdout_text.find("\"P_SPS\": 0.34592286") != std::string::npos);
  CHECK(r.stdout_text.find("\"K_bits_per_use\": 0.01766771") !=
        std::string::npos);
}

TEST_CASE("exit codes") {
  SUBCASE("usage errors exit 2") {
    CHECK(run_cli("keyrate --no-such-flag 1").exit_code == 2);
    CHECK(run_cli("figure fig9").exit_code == 2);
    CHECK(run_cli("keyrate --family tmsv --V 0.2 --L 10").exit_code == 2);
    CHECK(run_cli("keyrate --family tmsv --d 2 --L 10").exit_code == 2);
  }
  SUBCASE("physics errors exit 3") {
    CHECK(run_cli("keyrate --family sps-tmsv --Ts 1 --V 6 --L 50").exit_code ==
          3);
  }
  SUBCASE("selfcheck passes on a fresh checkout") {
    CHECK(run_cli("selfcheck").exit_code == 0);
  }
  SUBCASE("selfcheck names a corrupted fixture") {
    const std::string dir = std::string(std::tmpnam(nullptr)) + ".fixtures";
    (void)std::system(("mkdir -p " + dir).c_str());
    std::ofstream bad(dir + "/sps_tmsv_v2_ts0p9_amps.csv");
    bad << "# corrupted\n0,0,0.5,0.0\n";
    bad.close();
    const RunOutput r = run_cli("selfcheck --fixtures " + dir);
    CHECK(r.exit_code == 1);
    CHECK(r.stdout_text.find("[FAIL] golden-fixture") != std::string::npos);
    (void)std::system(("rm -rf " + dir).c_str());
  }
}

TEST_CASE("config file merges under flag overrides") {
  const std::string path = std::string(std::tmpnam(nullptr)) + ".json";
  {
    std::ofstream cfg(path);
    cfg << R"({"family": "tmsv", "V": 4.0, "link": {"L_AC_km": 80.0}})";
  }
  const RunOutput base = run_cli("keyrate --config " + path);
  CHECK(base.exit_code == 0);
  CHECK(base.stdout_text.find("\"V\": 4.0") != std::string::npos);
  CHECK(base.stdout_text.find("\"L_AC_km\": 80.0") != std::string::npos);

  const RunOutput overridden = run_cli("keyrate --config " + path + " --V 6");
  CHECK(overridden.stdout_text.find("\"V\": 6.0") != std::string::npos);
  CHECK(overridden.stdout_text.find("\"L_AC_km\": 80.0") != std::string::npos);

  const RunOutput bad = run_cli("keyrate --config /no/such/file.json");
  CHECK(bad.exit_code == 2);

  // CVMDI_CONFIG is the fallback when --config is absent
  const RunOutput via_env =
      run_cli("keyrate", "CVMDI_CONFIG=" + path + " ");
  CHECK(via_env.exit_code == 0);
  CHECK(via_env.stdout_text.find("\"L_AC_km\": 80.0") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("figure subcommand writes deterministic CSV") {
  const std::string cfg_path = std::string(std::tmpnam(nullptr)) + ".json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"V_grid": [2, 6, 10], "L_grid": [40, 90]})";
  }
  const RunOutput a = run_cli("figure fig2 --config " + cfg_path);
  const RunOutput b =
      run_cli("figure fig2 --config " + cfg_path + " --threads 2");
  CHECK(a.exit_code == 0);
  CHECK(a.stdout_text == b.stdout_text);
  CHECK(a.stdout_text.find("L_AC_km,V,K") != std::string::npos);
  std::remove(cfg_path.c_str());
}
