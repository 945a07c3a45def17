#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "likelihood.hpp"
#include "simulator.hpp"

using namespace ssploc;

namespace {

EnvironmentSpec one_ap(double shadowing) {
  EnvironmentSpec env;
  env.access_points.push_back({{0, 0}, {0.0}});
  env.pathloss.shadowing_std = shadowing;
  return env;
}

}  // namespace

TEST_CASE("path loss truth") {
  const auto env = one_ap(2.0);
  const auto truth = synth_radio_truth(env);
  CHECK(truth.mean_rssi(0, {1, 0}) == -30.0);
  CHECK(truth.mean_rssi(0, {0.2, 0}) == -30.0);  // inside d0
  CHECK(truth.mean_rssi(0, {10, 0}) == doctest::Approx(-60.0).epsilon(1e-14));
  double prev = 0;
  for (double d = 0; d < 30; d += 0.25) {
    const double v = truth.mean_rssi(0, {d, 0});
    if (d > 0) CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("canonical environment") {
  const auto env = EnvironmentSpec::canonical();
  CHECK(env.width == 21.0);
  CHECK(env.height == 16.0);
  CHECK(env.access_points.size() == 6);
  CHECK(env.feature_count() == 6);
  CHECK(grid_locations(env).size() == 22 * 17);
  CHECK_NOTHROW(env.validate());
}

TEST_CASE("environment validation names the field") {
  auto env = EnvironmentSpec::canonical();
  env.width = 0;
  try {
    env.validate();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).find("environment.width") != std::string::npos);
  }
  env = EnvironmentSpec::canonical();
  env.pathloss.shadowing_std = -1;
  CHECK_THROWS_AS(env.validate(), Error);
  env = EnvironmentSpec::canonical();
  env.access_points.clear();
  CHECK_THROWS_AS(env.validate(), Error);
}

TEST_CASE("grid counting") {
  EnvironmentSpec env = one_ap(0);
  env.width = 2;
  env.height = 2;
  const auto g = grid_locations(env);
  CHECK(g.size() == 9);
  CHECK(g.front() == Location{0, 0});
  CHECK(g[1] == Location{1, 0});
  CHECK(g.back() == Location{2, 2});
}

TEST_CASE("scan sampling") {
  const auto quiet = one_ap(0.0);
  const auto qt = synth_radio_truth(quiet);
  Rng rng = make_rng(1, 1);
  CHECK(sample_scan(qt, {5, 0}, quiet, rng).value_or_sentinel(0) == qt.mean_rssi(0, {5, 0}));

  const auto noisy = one_ap(2.0);
  const auto nt = synth_radio_truth(noisy);
  std::vector<double> draws;
  for (int i = 0; i < 10000; ++i) draws.push_back(sample_scan(nt, {5, 0}, noisy, rng).value_or_sentinel(0));
  CHECK(std::abs(population_std(draws) - 2.0) <= 0.1);

  // Far away the mean drops below the floor.
  const auto far = synth_radio_truth(quiet);
  CHECK(sample_scan(far, {1e6, 0}, quiet, rng).value_or_sentinel(0) == kMissingRssiDbm);
}

TEST_CASE("training set") {
  EnvironmentSpec env = one_ap(2.0);
  env.width = 2;
  env.height = 2;
  const auto truth = synth_radio_truth(env);
  Rng a = make_rng(42, 100), b = make_rng(42, 100);
  const auto s1 = build_training_set(env, truth, 100, a);
  const auto s2 = build_training_set(env, truth, 100, b);
  REQUIRE(s1.size() == 9);
  for (const auto& s : s1) CHECK(s.scan_count() == 100);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i].scans == s2[i].scans);
  CHECK_THROWS_AS(build_training_set(env, truth, 0, a), Error);
}

TEST_CASE("trajectory contracts") {
  const auto env = EnvironmentSpec::canonical();
  const auto truth = synth_radio_truth(env);
  for (auto policy : {WaypointPolicy::corridor_walk, WaypointPolicy::free_roam}) {
    TrajectorySpec spec;
    spec.policy = policy;
    const auto walk = generate_trajectory(spec, env, truth);
    REQUIRE(walk.truth.size() == 175);
    REQUIRE(walk.scans.size() == 175);
    for (const auto& s : walk.scans) CHECK(s.scan_count() == 2);
    for (std::size_t t = 0; t < walk.truth.size(); ++t) {
      const auto& p = walk.truth[t];
      CHECK(p.x >= 0);
      CHECK(p.x <= env.width);
      CHECK(p.y >= 0);
      CHECK(p.y <= env.height);
      if (t > 0) {
        const double d = euclidean_distance(walk.truth[t - 1], p);
        CHECK(d >= spec.speed_min * spec.delta_t - 1e-9);
        CHECK(d <= spec.speed_max * spec.delta_t + 1e-9);
      }
    }
    const auto again = generate_trajectory(spec, env, truth);
    CHECK(again.truth == walk.truth);
  }

  TrajectorySpec fixed;
  fixed.speed_min = fixed.speed_max = 1.0;
  const auto w = generate_trajectory(fixed, env, truth);
  for (std::size_t t = 1; t < w.truth.size(); ++t) {
    CHECK(euclidean_distance(w.truth[t - 1], w.truth[t]) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TrajectorySpec bad;
  bad.speed_min = 5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("history error injection") {
  Rng rng = make_rng(3, 200);
  CHECK(inject_history_error({3, 4}, 0.0, rng) == Location{3, 4});
  CHECK_THROWS_AS(inject_history_error({3, 4}, -1.0, rng), Error);

  const int n = 100000;
  double sx = 0, sxx = 0, r2 = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = inject_history_error({0, 0}, 4.0, rng);
    sx += p.x;
    sxx += p.x * p.x;
    r2 += p.x * p.x + p.y * p.y;
  }
  CHECK(std::sqrt(sxx / n - (sx / n) * (sx / n)) == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(0.02));
  CHECK(r2 / n == doctest::Approx(16.0).epsilon(0.03));
}

TEST_CASE("csi sampling") {
  const auto env = EnvironmentSpec::canonical();
  const auto truth = synth_radio_truth(env);
  CsiSpec csi;
  Rng rng = make_rng(42, 101);
  const auto m = sample_csi(truth, {3, 3}, env, csi, 30, rng);
  CHECK(m.rows() == 30);
  CHECK(m.cols() == 90);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) CHECK(m.at(r, c) >= 0.0);
  }
  // Closer to the AP means more power on average.
  Rng r1 = make_rng(1, 1), r2 = make_rng(1, 1);
  const auto ap = env.access_points[0].position;
  const auto near = csi_to_scanset(sample_csi(truth, ap, env, csi, 50, r1));
  const auto farm = csi_to_scanset(sample_csi(truth, {20, 15}, env, csi, 50, r2));
  double pn = 0, pf = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    pn += near.scans[i].value_or_sentinel(0);
    pf += farm.scans[i].value_or_sentinel(0);
  }
  CHECK(pn > pf);
}

TEST_CASE("rng streams are independent and reproducible") {
  Rng a = make_rng(42, 1), b = make_rng(42, 1), c = make_rng(42, 2);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
}
