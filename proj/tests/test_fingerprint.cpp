#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "error.hpp"
#include "fingerprint.hpp"

using namespace ssploc;

TEST_CASE("euclidean distance examples") {
  CHECK(euclidean_distance({0, 0}, {3, 4}) == 5.0);
  CHECK(euclidean_distance({1, 1}, {1, 1}) == 0.0);
  CHECK(euclidean_distance({-2, 0}, {2, 0}) == 4.0);
}

TEST_CASE("euclidean distance is symmetric and obeys the triangle inequality") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const Location a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    CHECK(euclidean_distance(a, b) == euclidean_distance(b, a));
    CHECK(euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12);
  }
}

TEST_CASE("feature vectors mark missing readings explicitly") {
  FeatureVector v(std::vector<std::optional<double>>{-40.0, std::nullopt, -70.0});
  CHECK(v.size() == 3);
  CHECK_FALSE(v.missing(0));
  CHECK(v.missing(1));
  CHECK(v.value_or_sentinel(1) == kMissingRssiDbm);
  CHECK(v.missing_count() == 1);
  CHECK_THROWS_AS(FeatureVector(std::vector<double>{std::nan("")}), Error);
  CHECK_THROWS_AS(FeatureVector(std::vector<double>{std::numeric_limits<double>::infinity()}), Error);
}

TEST_CASE("scan sets reject ragged rows") {
  ScanSet s;
  s.scans.emplace_back(std::vector<double>{-50.0, -60.0});
  s.scans.emplace_back(std::vector<double>{-51.0});
  CHECK_THROWS_AS(s.validate(), Error);
  s.scans.back() = FeatureVector(std::vector<double>{-51.0, -61.0});
  CHECK_NOTHROW(s.validate());
  CHECK(s.scan_count() == 2);
  CHECK(s.feature_count() == 2);
}

TEST_CASE("csi effective power") {
  CHECK(csi_effective_power(CsiMatrix(1, 4, {1, 1, 1, 1}), 0) == 4.0);
  CHECK(csi_effective_power(CsiMatrix(1, 3, {0, 0, 0}), 0) == 0.0);
  CHECK(csi_effective_power(CsiMatrix(1, 2, {3, 4}), 0) == 25.0);
  CHECK_THROWS_AS(csi_effective_power(CsiMatrix(1, 2, {3, 4}), 1), Error);
}

TEST_CASE("csi power is invariant under subcarrier permutation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> row(90);
  for (auto& a : row) a = u(rng);
  const double p = csi_effective_power(CsiMatrix(1, row.size(), row), 0);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(row.begin(), row.end(), rng);
    CHECK(csi_effective_power(CsiMatrix(1, row.size(), row), 0) == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("csi matrices validate their amplitudes and shape") {
  CHECK_THROWS_AS(CsiMatrix(1, 2, {1.0, -0.1}), Error);
  CHECK_THROWS_AS(CsiMatrix(0, 2, {}), Error);
  CHECK_THROWS_AS(CsiMatrix(2, 2, {1, 2, 3}), Error);
  CHECK_THROWS_AS(CsiMatrix(std::vector<std::vector<double>>{{1, 2}, {3}}), Error);
}

TEST_CASE("csi to scan set") {
  const auto s = csi_to_scanset(CsiMatrix(std::vector<std::vector<double>>{{1, 0}, {0, 2}}));
  REQUIRE(s.scan_count() == 2);
  CHECK(s.scans[0].value_or_sentinel(0) == 1.0);
  CHECK(s.scans[1].value_or_sentinel(0) == 4.0);
  CHECK_FALSE(s.location.has_value());

  const auto one = csi_to_scanset(CsiMatrix(1, 1, {5}), Location{1, 2});
  CHECK(one.scans[0].value_or_sentinel(0) == 25.0);
  CHECK(one.location == Location{1, 2});

  const auto big = csi_to_scanset(CsiMatrix(900, 90, std::vector<double>(900 * 90, 1.0)));
  CHECK(big.scan_count() == 900);
  CHECK(big.feature_count() == 1);
}
