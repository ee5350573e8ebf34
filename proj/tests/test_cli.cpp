// End-to-end checks of the command line tool: exit codes, output
// formats, config overlays, and the full sweep -> extract round trip.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

const std::filesystem::path& work_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "ionifo-cli-tests";
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunResult run_cli(const std::string& args, const std::string& env = "") {
  const auto out_file = work_dir() / "stdout.txt";
  std::string cmd;
  if (!env.empty()) cmd += env + " ";
  cmd += "\"" IONIFO_CLI_PATH "\" " + args + " > \"" + out_file.string() +
         "\" 2> /dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (status != -1 && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_file);
  return r;
}

std::string path_of(const char* name) { return (work_dir() / name).string(); }

void write_file(const char* name, const std::string& text) {
  std::ofstream(work_dir() / name) << text;
}

}  // namespace

TEST_CASE("design writes a trajectory file and reports S") {
  const auto r = run_cli("design --kind A --tf 0.5 --M 135 --out " +
                         path_of("traj_a.json") + " --profile " +
                         path_of("profile.csv"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("30.8571") != std::string::npos);
  const json traj = json::parse(slurp(work_dir() / "traj_a.json"));
  CHECK(traj.at("kind") == "A");
  CHECK(traj.at("t_final_us").get<double>() == Catch::Approx(0.5));
  REQUIRE(traj.at("coeffs_nm").size() == 7);
  CHECK(traj.at("coeffs_nm")[3].get<double>() ==
        Catch::Approx(64.0 * 135.0).epsilon(1e-9));
  std::istringstream profile(slurp(work_dir() / "profile.csv"));
  std::string line;
  std::getline(profile, line);
  CHECK(line == "t_us,alpha_nm,f_zN");
  int rows = 0;
  while (std::getline(profile, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 401);
}

TEST_CASE("design kind B takes S and v instead of M") {
  const auto r = run_cli("design --kind B --tf 0.5 --S 30.857142857 --v 75 --out " +
                         path_of("traj_b.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("cubic metric") != std::string::npos);
  const json traj = json::parse(slurp(work_dir() / "traj_b.json"));
  CHECK(traj.at("kind") == "B");
  CHECK(traj.at("coeffs_nm").size() == 9);
}

TEST_CASE("design rejects inconsistent or missing options") {
  CHECK(run_cli("design --kind A --tf 0.5 --out " + path_of("x.json"))
            .exit_code == 2);
  CHECK(run_cli("design --kind A --tf 0.5 --M 135 --S 30 --out " +
                path_of("x.json"))
            .exit_code == 2);
  CHECK(run_cli("design --kind C --tf 0.5 --M 135 --out " + path_of("x.json"))
            .exit_code == 2);
}

TEST_CASE("config file fills defaults and flags override it") {
  write_file("design.json",
             R"({"kind": "A", "tf_us": 0.5, "M_nm": 90.0})");
  const auto base = run_cli("design --config " + path_of("design.json") +
                            " --out " + path_of("cfg_traj.json"));
  CHECK(base.exit_code == 0);
  CHECK(base.out.find("20.5714") != std::string::npos);  // S for M = 90
  const auto overridden =
      run_cli("design --config " + path_of("design.json") + " --M 135 --out " +
              path_of("cfg_traj.json"));
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.out.find("30.8571") != std::string::npos);
  write_file("bad.json", R"({"kind": "A", "tf_us": 0.5, "M_nm": 90, "hue": 3})");
  CHECK(run_cli("design --config " + path_of("bad.json") + " --out " +
                path_of("x.json"))
            .exit_code == 2);
}

TEST_CASE("phase reports the differential phase and populations") {
  REQUIRE(run_cli("design --kind A --tf 0.5 --M 135 --out " +
                  path_of("traj.json"))
              .exit_code == 0);
  const auto r = run_cli("phase --traj " + path_of("traj.json") + " --c 10");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.at("scenario") == "both");
  CHECK(rep.at("delta_phi_rad").get<double>() ==
        Catch::Approx(5.8520704536).epsilon(1e-6));
  CHECK(rep.at("overlap").at("modulus").get<double>() ==
        Catch::Approx(1.0).margin(1e-9));
  CHECK(rep.at("p_up").get<double>() == Catch::Approx(0.9543).margin(1e-3));
  // Exact drive: the report carries the dynamical/geometric breakdown.
  CHECK(rep.at("branch_phases").contains("phi_geometric_up_rad"));
}

TEST_CASE("phase with the compensating crossing point nulls the signal") {
  const auto r = run_cli("phase --traj " + path_of("traj.json") +
                         " --c 10 --x0-auto");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.at("delta_phi_rad").get<double>() == Catch::Approx(0.0).margin(1e-9));
  CHECK(rep.at("p_up").get<double>() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("phase one-sided scenario reports the half-size phase") {
  const auto r = run_cli("phase --traj " + path_of("traj.json") +
                         " --c 10 --scenario one");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.at("scenario") == "one");
  CHECK(rep.at("delta_phi_rad").get<double>() ==
        Catch::Approx(3.0264).margin(2e-4));
}

TEST_CASE("phase with drive error drops the exact-drive breakdown") {
  const auto r = run_cli("phase --traj " + path_of("traj.json") +
                         " --c 10 --eps 2");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK_FALSE(rep.at("branch_phases").contains("phi_geometric_up_rad"));
  CHECK(rep.at("branch_phases").contains("g_up_rad"));
}

TEST_CASE("phase rejects contradictory options and bad files") {
  const std::string traj = " --traj " + path_of("traj.json");
  CHECK(run_cli("phase" + traj + " --c 10 --x0 5 --x0-auto").exit_code == 2);
  CHECK(run_cli("phase" + traj + " --c 10 --eps 1 --x0 5").exit_code == 2);
  CHECK(run_cli("phase" + traj + " --c 10 --scenario one --eps 1").exit_code == 2);
  CHECK(run_cli("phase --traj " + path_of("missing.json") + " --c 10")
            .exit_code == 1);
  write_file("broken.json", R"({"kind": "A", "t_final_us": 0.5})");
  CHECK(run_cli("phase --traj " + path_of("broken.json") + " --c 10")
            .exit_code == 1);
}

TEST_CASE("sweep then extract recovers the force") {
  const auto sweep = run_cli(
      "sweep --c 10 --tf 0.5 --M-from 15 --M-to 290 --M-steps 40 --out " +
      path_of("sweep.csv"));
  REQUIRE(sweep.exit_code == 0);
  std::istringstream csv(slurp(work_dir() / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "S_nm_us,P_up,P_down,delta_phi_rad,modulus");
  int rows = 0;
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 40);

  const auto extract = run_cli("extract --table " + path_of("sweep.csv"));
  REQUIRE(extract.exit_code == 0);
  const json rep = json::parse(extract.out);
  CHECK(rep.at("c_zN").get<double>() == Catch::Approx(10.0).epsilon(1e-3));
  CHECK(rep.at("period_nm_us").get<double>() ==
        Catch::Approx(33.129).epsilon(1e-3));
}

TEST_CASE("sweep without an output file prints csv to stdout") {
  const auto r =
      run_cli("sweep --c 10 --tf 0.5 --M-from 50 --M-to 150 --M-steps 5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("S_nm_us,P_up,P_down,delta_phi_rad,modulus\n", 0) == 0);
}

TEST_CASE("extract fails cleanly on a table that is too small") {
  write_file("tiny.csv",
             "S_nm_us,P_up,P_down,delta_phi_rad,modulus\n"
             "10,0.9,0.1,1,1\n11,0.8,0.2,1.1,1\n12,0.7,0.3,1.2,1\n");
  CHECK(run_cli("extract --table " + path_of("tiny.csv")).exit_code == 1);
}

TEST_CASE("jobs environment override must be a number") {
  CHECK(run_cli("sweep --c 10 --tf 0.5 --M-from 50 --M-to 150 --M-steps 5",
                "ION_IFO_JOBS=soon")
            .exit_code == 2);
}

TEST_CASE("verify reports checks and propagates failures to the exit code") {
  const auto ok = run_cli("verify --quick");
  CHECK(ok.exit_code == 0);
  const json rep = json::parse(ok.out);
  CHECK(rep.at("all_pass") == true);
  CHECK(rep.at("checks").size() == 8);
  const auto bad = run_cli("verify --quick --inject-fault delta-alpha-sign");
  CHECK(bad.exit_code == 1);
  CHECK(json::parse(bad.out).at("all_pass") == false);
}
