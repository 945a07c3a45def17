#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "experiment.hpp"

using namespace ssploc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ssploc_test_exp_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::internal;
}

}  // namespace

TEST_CASE("config round trip and defaults") {
  const ExperimentConfig c;
  const auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.environment.access_points.size() == 6);
  CHECK_FALSE(back.v_max.has_value());
  CHECK(back.track_config(1.0).d_max() == 4.0);
  CHECK(back.track_config(1.0).window.sigma == 4.0);

  const auto partial = config_from_json(json::parse(R"({"track": {"sigma": 0.5, "v_max": 2}})"));
  CHECK(partial.track_config(1.0).window.sigma == 1.0);
  CHECK(partial.seed == 42);
}

TEST_CASE("config errors name the field") {
  auto field = [](const char* text) {
    try {
      config_from_json(json::parse(text));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(field(R"({"environment": {"width": -1}})").find("environment.width") != std::string::npos);
  CHECK(field(R"({"track": {"window": "boxcar"}})").find("track.window") != std::string::npos);
  CHECK(field(R"({"track": {"sigma": "wide"}})").find("track.sigma") != std::string::npos);
  CHECK(field(R"({"trajectry": {}})").find("trajectry") != std::string::npos);
  CHECK(field(R"({"schema_version": 7})").find("schema_version") != std::string::npos);
  CHECK(field(R"({"environment": {"access_points": [{"x": 1}]}})").find("access_points[0]") != std::string::npos);
  CHECK(field(R"({"track": {"history_error": -0.5}})").find("track.history_error") != std::string::npos);
}

TEST_CASE("gen is deterministic and creates the output directory") {
  const auto a = scratch("gen_a") / "nested";
  const auto b = scratch("gen_b");
  command_gen({{"out_dir", a.string()}, {"config", {{"trajectory", {{"n_steps", 20}}}}}});
  command_gen({{"out_dir", b.string()}, {"config", {{"trajectory", {{"n_steps", 20}}}}}});
  for (const char* f : {"config.json", "training.json", "trajectory.json", "truth.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto other = scratch("gen_c");
  command_gen({{"out_dir", other.string()}, {"config", {{"seed", 7}, {"trajectory", {{"n_steps", 20}}}}}});
  CHECK(slurp(a / "truth.csv") != slurp(other / "truth.csv"));
  CHECK(kind_of([] { command_gen({{"out_dir", "x"}, {"config", {{"environment", {{"height", 0}}}}}}); }) ==
        ErrorKind::config);
}

TEST_CASE("train, track, sweep and bench through the command runners") {
  const auto dir = scratch("pipeline");
  command_gen({{"out_dir", (dir / "ds").string()}, {"config", {{"trajectory", {{"n_steps", 30}}}}}});
  const auto trained = command_train({{"dataset", (dir / "ds").string()}, {"family", "horus"},
                                      {"out", (dir / "map.json").string()}});
  CHECK(trained["rp_count"] == 374);
  CHECK(trained["feature_count"] == 6);
  CHECK(trained["family"] == "single_gaussian");
  CHECK(kind_of([&] { command_train({{"dataset", (dir / "ds").string()}, {"family", "bogus"}}); }) == ErrorKind::config);
  CHECK(kind_of([&] { command_train({{"dataset", (dir / "missing").string()}}); }) == ErrorKind::data);

  const json base{{"map", (dir / "map.json").string()}, {"dataset", (dir / "ds").string()}};
  json t1 = base;
  t1["out_dir"] = (dir / "t1").string();
  t1["config"] = {{"track", {{"alignment_steps", {0, 10, 20}}}}};
  const auto r1 = command_track(t1);
  CHECK(r1["steps"] == 30);
  json t2 = t1;
  t2["out_dir"] = (dir / "t2").string();
  command_track(t2);
  for (const char* f : {"estimates.json", "report.csv", "cdf.csv"}) CHECK(slurp(dir / "t1" / f) == slurp(dir / "t2" / f));
  const auto est = json::parse(slurp(dir / "t1" / "estimates.json"));
  CHECK(est["steps"][10]["flags"] == json({"aligned"}));
  CHECK(est["steps"][11]["flags"] == json::array());

  json h = base;
  h["out_dir"] = (dir / "h").string();
  h["config"] = {{"track", {{"history_error", 0.5}}}};
  command_track(h);
  const auto he = json::parse(slurp(dir / "h" / "estimates.json"));
  CHECK(he["steps"][0]["flags"] == json::array());
  CHECK(he["steps"][1]["flags"] == json({"history_perturbed"}));

  json s = base;
  s["out"] = (dir / "sweep.csv").string();
  const auto sw = command_sweep(s);
  CHECK(sw["cells"].size() == 16);
  std::istringstream lines(slurp(dir / "sweep.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 17);

  json b = base;
  b["out"] = (dir / "bench.csv").string();
  b["repeats"] = 2;
  const auto bench = command_bench(b);
  CHECK(bench["rows"].size() == 5);
  CHECK(bench["rows"][0]["window"] == "uniform");
}

TEST_CASE("csi datasets train the power model") {
  const auto dir = scratch("csi");
  command_gen({{"out_dir", (dir / "ds").string()},
               {"config", {{"fingerprint", "csi"},
                           {"environment", {{"width", 4}, {"height", 3}}},
                           {"csi", {{"measurements", 5}, {"subcarriers", 8}}},
                           {"trajectory", {{"n_steps", 5}}}}}});
  CHECK(fs::exists(dir / "ds" / "csi" / "index.csv"));
  const auto r = command_train({{"dataset", (dir / "ds").string()}, {"out", (dir / "map.json").string()}});
  CHECK(r["family"] == "csi_power_gaussian");
  CHECK(r["rp_count"] == 20);
  CHECK(r["feature_count"] == 1);
  const auto t = command_track({{"map", (dir / "map.json").string()}, {"dataset", (dir / "ds").string()},
                                {"out_dir", (dir / "t").string()}});
  CHECK(t["steps"] == 5);
}

TEST_CASE("ground-truth history source") {
  ExperimentConfig c;
  c.trajectory.n_steps = 25;
  const auto d = generate_dataset(c);
  const auto map = train_radio_map(d, ModelFamily::single_gaussian);
  c.history_source = HistorySource::ground_truth;
  const auto est = run_track(map, d.trajectory.scans, d.truth, c, 1.0);
  CHECK((est[1].flags & kFlagHistoryPerturbed) != 0);
  CHECK(kind_of([&] { run_track(map, d.trajectory.scans, {}, c, 1.0); }) == ErrorKind::data);
}
