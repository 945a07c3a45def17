#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(SSPLOC_CLI_PATH) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void setup() {
  static bool done = false;
  if (done) return;
  fs::remove_all("cli");
  REQUIRE(cli("gen --out cli/ds --steps 40") == 0);
  REQUIRE(cli("train --dataset cli/ds --family horus --out cli/map.json") == 0);
  done = true;
}

}  // namespace

TEST_CASE("gen is byte-identical across reruns") {
  setup();
  REQUIRE(cli("gen --out cli/ds2 --steps 40") == 0);
  for (const char* f : {"config.json", "training.json", "trajectory.json", "truth.csv"}) {
    CAPTURE(f);
    CHECK(slurp(fs::path("cli/ds") / f) == slurp(fs::path("cli/ds2") / f));
  }
}

TEST_CASE("train reports the model grid") {
  setup();
  REQUIRE(cli("train --dataset cli/ds --family dgd --out cli/dgd.json") == 0);
  const auto out = slurp("cli_stdout.txt");
  CHECK(out.find("\"rp_count\": 374") != std::string::npos);
  CHECK(out.find("\"feature_count\": 6") != std::string::npos);
  CHECK(out.find("double_gaussian") != std::string::npos);
}

TEST_CASE("track outputs and flags") {
  setup();
  REQUIRE(cli("track --map cli/map.json --dataset cli/ds --window uniform --out cli/mem") == 0);
  REQUIRE(cli("track --map cli/map.json --dataset cli/ds --window gaussian --sigma 1.0 --align 0,20 --out cli/ssp") == 0);
  for (const char* f : {"estimates.json", "report.csv", "cdf.csv"}) CHECK(fs::exists(fs::path("cli/ssp") / f));
  CHECK(slurp("cli/ssp/estimates.json").find("aligned") != std::string::npos);
  REQUIRE(cli("track --map cli/map.json --dataset cli/ds --window gaussian --sigma 1.0 --align 0,20 --out cli/ssp2") == 0);
  CHECK(slurp("cli/ssp/estimates.json") == slurp("cli/ssp2/estimates.json"));
  CHECK(slurp("cli/ssp/report.csv") == slurp("cli/ssp2/report.csv"));

  REQUIRE(cli("track --map cli/map.json --dataset cli/ds --history-error 0.5 --out cli/hist") == 0);
  CHECK(slurp("cli/hist/estimates.json").find("history_perturbed") != std::string::npos);
}

TEST_CASE("output directory from the environment") {
  setup();
  setenv("SSPLOC_OUTPUT_DIR", "cli/envout", 1);
  const int code = cli("track --map cli/map.json --dataset cli/ds");
  unsetenv("SSPLOC_OUTPUT_DIR");
  REQUIRE(code == 0);
  CHECK(fs::exists("cli/envout/estimates.json"));
}

TEST_CASE("sweep and bench tables") {
  setup();
  REQUIRE(cli("sweep --map cli/map.json --dataset cli/ds --out cli/sweep.csv") == 0);
  REQUIRE(cli("sweep --map cli/map.json --dataset cli/ds --out cli/sweep2.csv") == 0);
  CHECK(slurp("cli/sweep.csv") == slurp("cli/sweep2.csv"));
  REQUIRE(cli("sweep --map cli/map.json --dataset cli/ds --families uniform --out cli/flat.csv") == 0);
  REQUIRE(cli("bench --map cli/map.json --dataset cli/ds --repeats 2 --out cli/bench.csv") == 0);
  const auto bench = slurp("cli/bench.csv");
  for (const char* w : {"uniform", "circular", "gaussian", "hann", "tukey"}) CHECK(bench.find(w) != std::string::npos);
}

TEST_CASE("exit codes") {
  setup();
  CHECK(cli("train --dataset cli/ds --family nonsense") == 2);
  CHECK(cli("track --map cli/map.json --dataset cli/ds --window boxcar") == 2);
  CHECK(cli("track --map cli/missing.json --dataset cli/ds") == 3);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("") == 2);
  std::ofstream("cli/bad_config.json") << R"({"environment": {"width": -3}})";
  CHECK(cli("gen --config cli/bad_config.json --out cli/never") == 2);
  CHECK(slurp("cli_stderr.txt").find("environment.width") != std::string::npos);
  std::ofstream("cli/broken.json") << "{";
  CHECK(cli("track --map cli/broken.json --dataset cli/ds") == 3);
  CHECK(cli("--version") == 0);
}
