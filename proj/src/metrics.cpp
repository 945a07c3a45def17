#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "error.hpp"

namespace ssploc {

double ErrorReport::mean_step_seconds() const {
  if (step_seconds.empty()) return 0.0;
  return std::accumulate(step_seconds.begin(), step_seconds.end(), 0.0) /
         static_cast<double>(step_seconds.size());
}

std::vector<double> localization_errors(std::span<const Location> estimates,
                                        std::span<const Location> truth) {
  if (estimates.size() != truth.size()) {
    throw_argument("estimate count " + std::to_string(estimates.size()) +
                   " does not match truth count " + std::to_string(truth.size()));
  }
  std::vector<double> out(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) out[i] = euclidean_distance(estimates[i], truth[i]);
  return out;
}

std::vector<double> localization_errors(std::span<const StepEstimate> estimates,
                                        std::span<const Location> truth) {
  std::vector<Location> locs;
  locs.reserve(estimates.size());
  for (const auto& e : estimates) locs.push_back(e.estimate);
  return localization_errors(locs, truth);
}

double cdf_at(std::span<const double> errors, double threshold) {
  if (errors.empty()) throw_argument("CDF of an empty error list");
  const auto hits = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

ErrorReport summarize(std::span<const double> errors, std::size_t degraded_steps,
                      std::vector<double> step_seconds) {
  if (errors.empty()) throw_argument("cannot summarize an empty error list");
  ErrorReport r;
  r.errors.assign(errors.begin(), errors.end());
  r.degraded_steps = degraded_steps;
  r.step_seconds = std::move(step_seconds);

  const double n = static_cast<double>(errors.size());
  std::vector<double> sorted = r.errors;
  std::sort(sorted.begin(), sorted.end());
  // Summing in sorted order keeps the result independent of input order.
  r.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : sorted) ss += (e - r.mean) * (e - r.mean);
  r.std = std::sqrt(ss / n);
  r.max = sorted.back();
  const std::size_t mid = sorted.size() / 2;
  r.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * kCdfStep;
    const auto upto = std::upper_bound(sorted.begin(), sorted.end(), t);
    r.cdf.push_back({t, static_cast<double>(upto - sorted.begin()) / n});
    if (t >= r.max) break;
  }
  return r;
}

ErrorReport summarize_run(std::span<const StepEstimate> estimates, std::span<const Location> truth,
                          std::vector<double> step_seconds) {
  const auto errors = localization_errors(estimates, truth);
  const auto degraded = static_cast<std::size_t>(std::count_if(
      estimates.begin(), estimates.end(),
      [](const StepEstimate& e) { return (e.flags & kFlagEmptyPriorSupport) != 0; }));
  return summarize(errors, degraded, std::move(step_seconds));
}

double improvement_ratio(const ErrorReport& baseline, const ErrorReport& ssp) {
  if (baseline.errors.empty() || ssp.errors.empty()) throw_argument("improvement ratio of an empty report");
  if (baseline.mean == 0.0) throw_argument("improvement ratio against a zero-error baseline");
  return (baseline.mean - ssp.mean) / baseline.mean;
}

const SweepCell& SweepTable::at(WindowFamily family, double sigma) const {
  for (const auto& c : cells) {
    if (c.family == family && std::abs(c.sigma - sigma) <= 1e-12 * std::max(1.0, std::abs(sigma))) return c;
  }
  throw_argument("no sweep cell for " + std::string(to_string(family)) + " at sigma " + std::to_string(sigma));
}

SweepTable sigma_sweep(const RadioMap& map, std::span<const ScanSet> trajectory,
                       std::span<const Location> truth, std::span<const WindowFamily> families,
                       std::span<const double> sigmas, const TrackConfig& base,
                       const TrackOptions& options) {
  if (families.empty() || sigmas.empty()) throw_argument("sweep needs at least one family and one sigma");
  SweepTable table;
  table.d_max = base.d_max();
  for (WindowFamily family : families) {
    for (double sigma : sigmas) {
      TrackConfig cfg = base;
      cfg.window = {family, sigma};
      std::vector<double> seconds;
      TrackOptions opts = options;
      opts.step_seconds = &seconds;
      const auto estimates = track(map, trajectory, cfg, opts);
      table.cells.push_back({family, sigma, summarize_run(estimates, truth, std::move(seconds))});
    }
  }
  return table;
}

namespace {

void write_row(std::ostream& out, std::string_view family, double sigma, double d_max,
               const ErrorReport& r) {
  out << family << ',' << sigma << ',' << (d_max > 0.0 ? sigma / d_max : 0.0) << ',' << r.mean << ','
      << r.std << ',' << r.max << ',' << r.median << ',' << r.degraded_steps << '\n';
}

constexpr const char* kReportHeader = "family,sigma_m,sigma_dmax,mean,std,max,median,flags\n";

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << kReportHeader;
  for (const auto& c : table.cells) write_row(out, to_string(c.family), c.sigma, table.d_max, c.report);
}

void write_report_csv(std::ostream& out, const ErrorReport& report, const PriorWindow& window,
                      double d_max) {
  out << kReportHeader;
  write_row(out, to_string(window.family), window.sigma, d_max, report);
}

void write_cdf_csv(std::ostream& out, const ErrorReport& report) {
  out << "threshold,fraction\n";
  for (const auto& p : report.cdf) out << p.threshold << ',' << p.fraction << '\n';
}

}  // namespace ssploc
