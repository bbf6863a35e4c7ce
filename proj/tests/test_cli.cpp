#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hos/report.hpp"

// End-to-end checks of the command-line tool, driven through a subprocess.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CmdResult {
  int exit_code;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "hos_cli_test.log";
  const std::string cmd = std::string(HOS_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, ss.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hos_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("coeffs command", "[cli]") {
  SECTION("preset report carries exact fractions and the right orders") {
    const fs::path dir = fresh_dir("coeffs_hos4");
    const auto r = run_cli("coeffs --preset HOS4 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const json trunc = slurp_json(dir / "truncation.json");
    REQUIRE(trunc.at("node").at("order") == 8);
    REQUIRE(trunc.at("staggered").at("order") == 8);
    const std::string csv = slurp(dir / "coeffs.csv");
    REQUIRE(csv.find("3667/5440") != std::string::npos);
    REQUIRE(csv.find("183/76160") != std::string::npos);
  }
  SECTION("explicit float parameters reproduce the first preset's table") {
    const fs::path dir = fresh_dir("coeffs_float");
    const auto r = run_cli(
        "coeffs --m-stag 0.70710678118654752 --a2-stag 0 --m-node 0.70710678118654752 "
        "--a2-node 0 --out " +
        dir.string());
    REQUIRE(r.exit_code == 0);
    const hos::CsvTable table = hos::read_csv(dir / "coeffs.csv");
    bool saw_center = false;
    for (const auto& row : table.rows) {
      if (row[1] == "mass_staggered" && row[2] == "0") {
        REQUIRE_THAT(std::stod(row[4]), Catch::Matchers::WithinRel(22.0 / 24.0, 1e-12));
        saw_center = true;
      }
    }
    REQUIRE(saw_center);
  }
  SECTION("missing scheme parameters are a usage error") {
    REQUIRE(run_cli("coeffs --m-stag 0.7").exit_code == 2);
  }
  SECTION("a stability-violating scheme is rejected with the invariant named") {
    const auto r = run_cli("coeffs --m-stag 2.5 --a2-stag 0.05 --m-node 2.5 --a2-node 0.05");
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.output.find("stability criterion") != std::string::npos);
  }
}

TEST_CASE("convergence command produces a deterministic table", "[cli]") {
  const fs::path dir1 = fresh_dir("conv1");
  const fs::path dir2 = fresh_dir("conv2");
  const std::string args = "convergence --example ex1 --preset HOS1 --J 10,15 --dt h4 --out ";
  REQUIRE(run_cli(args + dir1.string()).exit_code == 0);
  REQUIRE(run_cli(args + dir2.string()).exit_code == 0);
  const std::string a = slurp(dir1 / "convergence.csv");
  REQUIRE(a == slurp(dir2 / "convergence.csv"));  // byte-identical rerun
  const hos::CsvTable table = hos::read_csv(dir1 / "convergence.csv");
  REQUIRE(table.rows.size() == 2);
  REQUIRE(table.rows[0][0] == "HOS1");
}

TEST_CASE("run command: config file with flag overrides and manifest hashing", "[cli]") {
  const fs::path dir = fresh_dir("runcfg");
  const fs::path cfg_path = dir / "cfg.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"example":"ex1","scheme":{"preset":"HOS1"},"stepper":"euler",
               "J":10,"dt":"h4","T":0.05})";
  }
  const fs::path out1 = fresh_dir("runcfg_out1");
  REQUIRE(run_cli("run --config " + cfg_path.string() + " --out " + out1.string()).exit_code == 0);
  const json man1 = slurp_json(out1 / "manifest.json");
  REQUIRE(man1.at("config").at("J") == 10);
  REQUIRE(man1.at("status") == "ok");
  REQUIRE(man1.contains("errors"));  // exact solution available

  // flag override changes the resolved config and therefore the hash
  const fs::path out2 = fresh_dir("runcfg_out2");
  REQUIRE(run_cli("run --config " + cfg_path.string() + " --J 12 --out " + out2.string())
              .exit_code == 0);
  const json man2 = slurp_json(out2 / "manifest.json");
  REQUIRE(man2.at("config").at("J") == 12);
  REQUIRE(man1.at("config_hash") != man2.at("config_hash"));

  // identical rerun reproduces the hash
  const fs::path out3 = fresh_dir("runcfg_out3");
  REQUIRE(run_cli("run --config " + cfg_path.string() + " --out " + out3.string()).exit_code == 0);
  REQUIRE(slurp_json(out3 / "manifest.json").at("config_hash") == man1.at("config_hash"));

  SECTION("unknown config fields are rejected") {
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"example":"ex1","scheme":{"preset":"HOS1"},"J":10,
                             "dt":"h4","bogus_field":1})";
    REQUIRE(run_cli("run --config " + bad.string()).exit_code == 2);
  }
}

TEST_CASE("custom problem through the config document", "[cli]") {
  const fs::path dir = fresh_dir("custom");
  const fs::path cfg_path = dir / "cfg.json";
  std::ofstream(cfg_path) << R"({
    "custom": {"domain": [0, 5], "velocity": 0.012, "diffusion": 0.17477, "initial": 0,
               "isotherm": {"type": "langmuir", "params": {"KL": 2.6, "Sm": 3e-4}, "scale": 5.0},
               "bc": {"type": "inlet_outlet", "c_in": 0.1}},
    "scheme": {"preset": "HOS1-D"}, "J": 10, "dt": "1.0", "T": 30})";
  REQUIRE(run_cli("run --config " + cfg_path.string() + " --out " + dir.string()).exit_code == 0);
  const hos::CsvTable steps = hos::read_csv(dir / "steps.csv");
  REQUIRE(steps.rows.size() == 31);  // baseline + 30 daily steps
}

TEST_CASE("mass command hits the requested report times", "[cli]") {
  const fs::path dir = fresh_dir("mass");
  const auto r = run_cli(
      "mass --example ex1 --preset HOS2 --J 12 --dt 0.05 --times 0.1,0.2 --out " + dir.string());
  REQUIRE(r.exit_code == 0);
  const hos::CsvTable table = hos::read_csv(dir / "mass.csv");
  REQUIRE(table.rows.size() == 2);
  REQUIRE(std::stod(table.rows[1][3]) <= 1e-12);
}

TEST_CASE("plot command renders known CSV schemas and rejects garbage", "[cli]") {
  const fs::path dir = fresh_dir("plots");

  SECTION("breakthrough lines") {
    const fs::path brk = fresh_dir("plots_brk");
    REQUIRE(
        run_cli("breakthrough --variant hos1-d --lengths 5 --horizon 20 --out " + brk.string())
            .exit_code == 0);
    REQUIRE(run_cli("plot --input " + (brk / "breakthrough.csv").string() + " --out " +
                    dir.string())
                .exit_code == 0);
    const std::string svg = slurp(dir / "breakthrough_hos1_d.svg");
    REQUIRE(svg.find("<svg") != std::string::npos);
    REQUIRE(svg.find("polyline") != std::string::npos);
  }

  SECTION("sweep heatmaps with the minimum marked") {
    const fs::path sw = fresh_dir("plots_sweep");
    REQUIRE(run_cli("sweep --example ex1 --J 10 --halfwidth 0.05 --out " + sw.string())
                .exit_code == 0);
    REQUIRE(run_cli("plot --input " + (sw / "sweep.csv").string() + " --out " + dir.string())
                .exit_code == 0);
    REQUIRE(fs::exists(dir / "sweep_eps_c2.svg"));
    REQUIRE(fs::exists(dir / "sweep_eps_z2.svg"));
  }

  SECTION("empty CSV fails") {
    const fs::path empty = dir / "empty.csv";
    fs::create_directories(dir);
    std::ofstream(empty) << "t_days,length_m,variant,c_rel\n";
    REQUIRE(run_cli("plot --input " + empty.string()).exit_code != 0);
  }

  SECTION("malformed CSV names the offending row") {
    const fs::path bad = dir / "bad.csv";
    fs::create_directories(dir);
    std::ofstream(bad) << "t_days,length_m,variant,c_rel\n1,5,HOS1-D,0.5\n2,5,HOS1-D\n";
    const auto r = run_cli("plot --input " + bad.string());
    REQUIRE(r.exit_code != 0);
    REQUIRE(r.output.find("row 3") != std::string::npos);
  }
}

TEST_CASE("numerical failures exit with code 3", "[cli]") {
  // an advection-dominated run at a huge time step cannot converge
  const fs::path dir = fresh_dir("numfail");
  const fs::path cfg_path = dir / "cfg.json";
  std::ofstream(cfg_path) << R"({
    "custom": {"domain": [0, 1], "velocity": 1e8, "diffusion": 1e-12, "initial": 1.0,
               "isotherm": {"type": "freundlich", "params": {"KF": 1.0, "alpha": 0.33}},
               "bc": {"type": "periodic"}},
    "scheme": {"preset": "HOS3"}, "J": 16, "dt": "0.5", "T": 10})";
  const auto r = run_cli("run --config " + cfg_path.string() + " --out " + dir.string());
  REQUIRE(r.exit_code == 3);
}
