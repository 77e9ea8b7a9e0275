// Integration tests that spawn the CLI binary and check output formats and
// exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef BESQ_CLI_PATH
#error "BESQ_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                               "/besq_cli_out_" + std::to_string(::getpid()) + ".txt";
  const std::string cmd = std::string(BESQ_CLI_PATH) + " " + args + " >" + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(out_file);
  std::stringstream ss;
  ss << f.rdbuf();
  r.out = ss.str();
  std::remove(out_file.c_str());
  return r;
}

std::string last_line(const std::string& text) {
  std::string line;
  std::string last;
  std::stringstream ss(text);
  while (std::getline(ss, line))
    if (!line.empty()) last = line;
  return last;
}

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("simulate --help").exit_code == 0);
}

TEST_CASE("classify emits the report JSON") {
  const RunResult r = run_cli("classify --p 3 --alpha 1 --x0 1,2,3");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["unique_strong"] == true);
  CHECK(j["n_star"] == 2);
  CHECK(j["rk_plus"] == 3);
}

TEST_CASE("config errors exit with code 2 and name the offender") {
  {
    const RunResult r = run_cli("classify --p 3 --alpha 1 --x0 0,1");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("x0") != std::string::npos);
  }
  {
    const RunResult r = run_cli("classify --p 3 --alpha 1 --x0 1,2,3 --bogus 1");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("bogus") != std::string::npos);
  }
  {
    const RunResult r = run_cli("simulate --model nosuch --p 1 --alpha 1 --x0 1");
    CHECK(r.exit_code == 2);
  }
  {
    const RunResult r = run_cli("classify --p 3 --alpha oops --x0 1,2,3");
    CHECK(r.exit_code == 2);
  }
  {
    const RunResult r = run_cli("classify --alpha 1 --x0 1,2,3");
    CHECK(r.exit_code == 2);  // missing required --p
  }
}

TEST_CASE("zero-noise simulate reproduces the deterministic Euler line") {
  const RunResult r = run_cli(
      "simulate --model particles --p 1 --alpha 2 --x0 4 --dt 0.1 --horizon 1 --seed 0 --zero-noise");
  REQUIRE(r.exit_code == 0);
  const std::string row = last_line(r.out);
  double t = 0.0;
  double x = 0.0;
  REQUIRE(std::sscanf(row.c_str(), "%lf,%lf", &t, &x) == 2);
  CHECK(t == doctest::Approx(1.0));
  CHECK(x == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("config file values are overridden by flags") {
  const std::string cfg = std::string("/tmp/besq_cfg_") + std::to_string(::getpid()) + ".ini";
  {
    std::ofstream f(cfg);
    f << "# grid settings\n";
    f << "dt = 0.25\n";
    f << "horizon = 1.0\n";
  }
  // From the file: 5 rows (t = 0, .25, .5, .75, 1) after the header.
  const RunResult file_only =
      run_cli("simulate --model particles --p 1 --alpha 0 --x0 1 --zero-noise --config " + cfg);
  REQUIRE(file_only.exit_code == 0);
  int rows = -1;  // discount header
  {
    std::stringstream ss(file_only.out);
    std::string line;
    while (std::getline(ss, line))
      if (!line.empty()) ++rows;
  }
  CHECK(rows == 5);
  // Flag overrides the file: dt = 0.5 gives 3 rows.
  const RunResult overridden = run_cli(
      "simulate --model particles --p 1 --alpha 0 --x0 1 --zero-noise --dt 0.5 --config " + cfg);
  REQUIRE(overridden.exit_code == 0);
  rows = -1;
  {
    std::stringstream ss(overridden.out);
    std::string line;
    while (std::getline(ss, line))
      if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);

  // Unknown key in the file is rejected by name.
  {
    std::ofstream f(cfg);
    f << "dt = 0.25\nnot_a_key = 7\n";
  }
  const RunResult bad =
      run_cli("simulate --model particles --p 1 --alpha 0 --x0 1 --zero-noise --config " + cfg);
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.find("not_a_key") != std::string::npos);
  std::remove(cfg.c_str());
}

TEST_CASE("simulate writes CSV plus events sidecar") {
  const std::string out = std::string("/tmp/besq_path_") + std::to_string(::getpid()) + ".csv";
  const RunResult r = run_cli("simulate --model particles --p 2 --alpha 3 --x0 1,2 --dt 0.01 "
                              "--horizon 0.1 --seed 3 --out " + out);
  REQUIRE(r.exit_code == 0);
  std::ifstream csv(out);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,X1,X2");
  std::ifstream ev(out + ".events.json");
  REQUIRE(ev.good());
  const nlohmann::json j = nlohmann::json::parse(ev);
  CHECK(j.contains("events"));
  CHECK(j["aborted"] == false);
  std::remove(out.c_str());
  std::remove((out + ".events.json").c_str());
}

TEST_CASE("mc emits a summary with the stable keys, independent of threads") {
  const std::string args =
      "mc --model particles --p 2 --alpha 3 --x0 1,2 --dt 0.01 --horizon 0.5 --stat e1@0.5 "
      "--reps 200 --seed 11";
  const RunResult a = run_cli(args + " --threads 2");
  REQUIRE(a.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(a.out);
  for (const char* key : {"estimate", "std_error", "ci95", "n_reps", "completion_rate"})
    CHECK(j.contains(key));
  CHECK(j["n_reps"] == 200);
  const RunResult b = run_cli(args + " --threads 1");
  CHECK(a.out == b.out);
  const RunResult c = run_cli(args + " --threads 2");
  CHECK(a.out == c.out);
}

TEST_CASE("verify suites pass and exit 0") {
  const RunResult r = run_cli("verify --suite identities --p-max 8 --cases 500 --seed 7");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  for (const char* suite : {"coefficients", "brackets", "roundtrip"}) {
    const RunResult s = run_cli(std::string("verify --suite ") + suite +
                                " --p-max 6 --cases 40 --seed 3");
    CHECK(s.exit_code == 0);
    CHECK(s.out.find("FAIL") == std::string::npos);
  }
  const RunResult bad = run_cli("verify --suite nosuch");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("numerical aborts exit with code 3") {
  const RunResult r = run_cli(
      "simulate --model particles --p 1 --alpha 1e308 --x0 1 --dt 10 --horizon 20 --seed 1");
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("abort") != std::string::npos);
}

TEST_CASE("simulate legacy models run end to end") {
  {
    const RunResult r = run_cli(
        "simulate --model non-unique --p 3 --alpha 1 --x0 0,0,1 --dt 0.01 --horizon 0.1 --seed 2");
    REQUIRE(r.exit_code == 0);
    const std::string row = last_line(r.out);
    double t = 0.0, x1 = 0.0, x2 = 0.0, x3 = 0.0;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf", &t, &x1, &x2, &x3) == 4);
    CHECK(x1 == 0.0);
    CHECK(x2 == 0.0);
  }
  {
    const RunResult r = run_cli(
        "simulate --model glued --p 2 --alpha 0 --x0 0,0 --dt 0.1 --horizon 1 --zero-noise");
    REQUIRE(r.exit_code == 0);
    const std::string row = last_line(r.out);
    double t = 0.0, x1 = 0.0, x2 = 0.0;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf", &t, &x1, &x2) == 3);
    CHECK(x1 == doctest::Approx(-1.0));
    CHECK(x2 == doctest::Approx(1.0));
  }
  {
    const RunResult r = run_cli(
        "simulate --model pinned --p 3 --alpha 1 --x0 0,0,2 --dt 0.1 --horizon 1 --zero-noise");
    REQUIRE(r.exit_code == 0);
    const std::string row = last_line(r.out);
    double t = 0.0, x1 = 0.0, x2 = 0.0, x3 = 0.0;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf", &t, &x1, &x2, &x3) == 4);
    CHECK(x3 == doctest::Approx(5.0).epsilon(1e-9));
  }
  {
    const RunResult r = run_cli(
        "simulate --model wishart --p 2 --alpha 3 --x0 1,2 --dt 0.1 --horizon 0.5 --zero-noise");
    REQUIRE(r.exit_code == 0);
    const std::string row = last_line(r.out);
    double t = 0.0, x1 = 0.0, x2 = 0.0;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf", &t, &x1, &x2) == 3);
    CHECK(x1 == doctest::Approx(1.0 + 3.0 * 0.5));
    CHECK(x2 == doctest::Approx(2.0 + 3.0 * 0.5));
  }
  {
    const RunResult r = run_cli(
        "simulate --model polys --p 2 --alpha 3 --x0 1,2 --dt 0.1 --horizon 0.5 --zero-noise");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("t,e1,e2") != std::string::npos);
  }
}
