#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "error.hpp"
#include "metrics.hpp"

using namespace ssploc;

namespace {

ErrorReport report_of(std::vector<double> e) { return summarize(e); }

}  // namespace

TEST_CASE("localization errors") {
  const std::vector<Location> truth{{0, 0}, {1, 1}};
  CHECK(localization_errors(truth, truth) == std::vector<double>{0, 0});
  const std::vector<Location> est{{3, 4}, {1, 1}};
  CHECK(localization_errors(est, truth)[0] == 5.0);
  const std::vector<Location> shorter{{0, 0}};
  CHECK_THROWS_AS(localization_errors(shorter, truth), Error);
}

TEST_CASE("summarize examples") {
  const auto a = report_of({1, 1, 1});
  CHECK(a.mean == 1.0);
  CHECK(a.std == 0.0);
  CHECK(a.max == 1.0);
  const auto b = report_of({0, 2});
  CHECK(b.mean == 1.0);
  CHECK(b.std == 1.0);
  CHECK(b.max == 2.0);
  CHECK(b.median == 1.0);
  CHECK(report_of({3, 1, 2}).median == 2.0);
  CHECK(cdf_at(b.errors, b.max) == 1.0);
  CHECK(b.cdf.back().fraction == 1.0);
  CHECK_THROWS_AS(summarize(std::vector<double>{}), Error);
}

TEST_CASE("cdf grid and counting oracle") {
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> ex(0.7);
  std::vector<double> e(301);
  for (auto& v : e) v = ex(rng);
  const auto r = summarize(e);
  CHECK(r.mean <= r.max);
  for (std::size_t i = 0; i < r.cdf.size(); ++i) {
    const auto& p = r.cdf[i];
    CHECK(p.threshold == doctest::Approx(0.25 * static_cast<double>(i)));
    const auto n = std::count_if(e.begin(), e.end(), [&](double x) { return x <= p.threshold; });
    CHECK(p.fraction == static_cast<double>(n) / static_cast<double>(e.size()));
    if (i > 0) CHECK(p.fraction >= r.cdf[i - 1].fraction);
  }
  CHECK(r.cdf.back().fraction == 1.0);
  for (double t : {0.0, 0.1, 1.3, 100.0}) {
    const auto n = std::count_if(e.begin(), e.end(), [&](double x) { return x <= t; });
    CHECK(cdf_at(e, t) == static_cast<double>(n) / static_cast<double>(e.size()));
  }
}

TEST_CASE("summarize is permutation invariant") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<double> e(97);
  for (auto& v : e) v = u(rng);
  const auto base = summarize(e);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(e.begin(), e.end(), rng);
    const auto r = summarize(e);
    CHECK(r.mean == base.mean);
    CHECK(r.std == base.std);
    CHECK(r.median == base.median);
    CHECK(r.max == base.max);
  }
}

TEST_CASE("improvement ratio") {
  CHECK(improvement_ratio(report_of({1.5}), report_of({1.0})) == doctest::Approx(1.0 / 3));
  CHECK(improvement_ratio(report_of({2.0}), report_of({2.0})) == 0.0);
  CHECK(improvement_ratio(report_of({4.4}), report_of({2.2})) == doctest::Approx(0.5));
  // Swapping flips the sign.
  CHECK(improvement_ratio(report_of({1.0}), report_of({1.5})) < 0);
  CHECK_THROWS_AS(improvement_ratio(report_of({0.0}), report_of({1.0})), Error);
}

TEST_CASE("sigma sweep covers the cross product") {
  std::vector<ReferencePoint> rps;
  for (int i = 0; i < 10; ++i) {
    ReferencePoint rp{i, {static_cast<double>(i), 0}, {}};
    rp.models.emplace_back(ModelFamily::single_gaussian, GaussianParams{-40.0 - 3 * i, 2});
    rps.push_back(std::move(rp));
  }
  const RadioMap map(rps, ModelFamily::single_gaussian);
  std::vector<ScanSet> walk;
  std::vector<Location> truth;
  for (int t = 0; t < 10; ++t) {
    ScanSet s;
    s.scans.emplace_back(std::vector<double>{-40.0 - 3 * t + (t % 3 - 1)});
    walk.push_back(s);
    truth.push_back({static_cast<double>(t), 0});
  }
  TrackConfig base;
  const std::vector<WindowFamily> fams{WindowFamily::circular, WindowFamily::gaussian, WindowFamily::hann,
                                       WindowFamily::tukey};
  const std::vector<double> sigmas{2, 4, 6, 8};
  const auto table = sigma_sweep(map, walk, truth, fams, sigmas, base);
  CHECK(table.cells.size() == 16);
  CHECK(table.d_max == 4.0);
  CHECK(table.at(WindowFamily::hann, 6).sigma == 6.0);

  const std::vector<WindowFamily> uni{WindowFamily::uniform};
  const auto flat = sigma_sweep(map, walk, truth, uni, sigmas, base);
  for (const auto& c : flat.cells) CHECK(c.report.mean == flat.cells[0].report.mean);

  std::ostringstream a, b;
  write_sweep_csv(a, table);
  write_sweep_csv(b, sigma_sweep(map, walk, truth, fams, sigmas, base));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("family,sigma_m,sigma_dmax,mean,std,max,median,flags\n", 0) == 0);
}
