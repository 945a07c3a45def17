#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "engine.hpp"

namespace ssploc {

inline constexpr double kCdfStep = 0.25;  // meters

struct CdfPoint {
  double threshold = 0.0;  // meters
  double fraction = 0.0;   // share of errors <= threshold
};

struct ErrorReport {
  std::vector<double> errors;  // meters, one per step
  double mean = 0.0;
  double std = 0.0;  // population
  double max = 0.0;
  double median = 0.0;
  std::vector<CdfPoint> cdf;  // 0, 0.25, ... up to the first threshold >= max
  std::size_t degraded_steps = 0;
  std::vector<double> step_seconds;

  double mean_step_seconds() const;
};

std::vector<double> localization_errors(std::span<const StepEstimate> estimates,
                                        std::span<const Location> truth);
std::vector<double> localization_errors(std::span<const Location> estimates,
                                        std::span<const Location> truth);

// Fraction of errors <= threshold.
double cdf_at(std::span<const double> errors, double threshold);

ErrorReport summarize(std::span<const double> errors, std::size_t degraded_steps = 0,
                      std::vector<double> step_seconds = {});

// Errors against ground truth, counting steps flagged with empty prior support.
ErrorReport summarize_run(std::span<const StepEstimate> estimates, std::span<const Location> truth,
                          std::vector<double> step_seconds = {});

// (baseline.mean - ssp.mean) / baseline.mean
double improvement_ratio(const ErrorReport& baseline, const ErrorReport& ssp);

struct SweepCell {
  WindowFamily family = WindowFamily::gaussian;
  double sigma = 0.0;  // meters
  ErrorReport report;
};

struct SweepTable {
  std::vector<SweepCell> cells;  // family-major, in the order requested
  double d_max = 0.0;

  const SweepCell& at(WindowFamily family, double sigma) const;
};

// Tracks the same trajectory once per (family, sigma) pair, everything else
// taken from `base`.
SweepTable sigma_sweep(const RadioMap& map, std::span<const ScanSet> trajectory,
                       std::span<const Location> truth, std::span<const WindowFamily> families,
                       std::span<const double> sigmas, const TrackConfig& base,
                       const TrackOptions& options = {});

// family,sigma_m,sigma_dmax,mean,std,max,median,flags
void write_sweep_csv(std::ostream& out, const SweepTable& table);
// One ErrorReport as the same columns, labelled with the window used.
void write_report_csv(std::ostream& out, const ErrorReport& report, const PriorWindow& window,
                      double d_max);
// threshold,fraction
void write_cdf_csv(std::ostream& out, const ErrorReport& report);

}  // namespace ssploc
