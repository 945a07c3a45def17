#pragma once

// Bayes localization over a radio map, with an optional short-term-memory
// prior centred on the previous position estimate.
//
// Memoryless localization uses a uniform prior over RPs. The semi-sequential
// variant replaces it with a window over the distance D between each RP and
// the previous estimate, normalized over the map:
//
//   prior_i     = w(D(l_i, l_pre)) / sum_j w(D(l_j, l_pre))
//   posterior_i ~ prior_i * prod_k P(F_k | l_i)
//
// All probability arithmetic runs in the log domain with max subtraction.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "fingerprint.hpp"
#include "radio_map.hpp"

namespace ssploc {

enum class WindowFamily { circular, gaussian, hann, tukey, uniform };

std::string_view to_string(WindowFamily family);
std::optional<WindowFamily> parse_window_family(std::string_view name);

struct PriorWindow {
  WindowFamily family = WindowFamily::gaussian;
  double sigma = 4.0;  // meters; ignored by the uniform family

  // Throws an argument error unless sigma is finite and > 0 (uniform exempt).
  void validate() const;
};

// Unnormalized prior weight in [0, 1] at distance d >= 0 from the previous
// estimate:
//   circular  1 if d <= sigma else 0
//   gaussian  exp(-d^2 / (2 sigma^2))
//   hann      cos^2(pi d / (2 (d + sigma)))
//   tukey     1 if d < sigma else (1 + cos(pi d / (2 (d + sigma)))) / 2
//   uniform   1
// The tukey form jumps from 1 to ~0.854 at d = sigma.
double window_prob(const PriorWindow& window, double d);

std::vector<double> uniform_prior(std::size_t m);

// Normalized window weights over all RPs, or nullopt when every RP gets zero
// weight (empty prior support).
std::optional<std::vector<double>> prior_over_map(const RadioMap& map, const Location& previous,
                                                  const PriorWindow& window);

enum class MatchingMode {
  per_scan_product,  // every scan contributes its own likelihood term
  mean_scan,         // scans are averaged per feature first
};

std::string_view to_string(MatchingMode mode);
std::optional<MatchingMode> parse_matching_mode(std::string_view name);

// Entry i is sum over scans and features of ln P(F_k | l_i). Missing readings
// are matched as kMissingRssiDbm. Throws a data error on N mismatch.
std::vector<double> log_likelihood_over_map(const RadioMap& map, const ScanSet& scans,
                                            MatchingMode mode = MatchingMode::per_scan_product);

// Normalized posterior from log-likelihoods and a prior. Zero prior entries
// stay exactly zero. Throws when lengths differ or the prior is all zero.
std::vector<double> posterior(std::span<const double> log_likelihoods, std::span<const double> prior);

// Likelihood-only posterior, no prior involved.
std::vector<double> memoryless_posterior(std::span<const double> log_likelihoods);

struct LocationEstimate {
  Location location;
  std::vector<std::int64_t> top_k_ids;
};

// Mean location of the K RPs with the largest posterior (ties go to the
// lower rp_id). K = 1 is the argmax. With `weighted` the mean is weighted by
// posterior mass instead.
LocationEstimate estimate_location(const RadioMap& map, std::span<const double> post,
                                   std::size_t top_k, bool weighted = false);

struct TrackConfig {
  PriorWindow window;
  double v_max = 4.0;    // m/s
  double delta_t = 1.0;  // s
  std::size_t top_k = 1;
  MatchingMode matching = MatchingMode::per_scan_product;
  bool weighted_top_k = false;

  // Maximum distance travelled between consecutive measurements.
  double d_max() const noexcept { return v_max * delta_t; }
  void validate() const;
};

struct TrackState {
  std::optional<Location> previous_estimate;
  std::size_t step_index = 0;
};

enum StepFlag : unsigned {
  kFlagEmptyPriorSupport = 1u << 0,  // window gave every RP zero weight; uniform prior used
  kFlagAligned = 1u << 1,            // memory cleared at this step
  kFlagHistoryPerturbed = 1u << 2,   // previous location was replaced before building the prior
};

struct StepEstimate {
  std::size_t step_index = 0;
  Location estimate;
  std::vector<double> posterior;
  std::vector<std::int64_t> top_k_ids;
  std::vector<double> log_likelihoods;
  unsigned flags = 0;
};

// The baseline: each measurement localized on its own.
StepEstimate localize_memoryless(const RadioMap& map, const ScanSet& scans, std::size_t top_k = 1,
                                 MatchingMode matching = MatchingMode::per_scan_product,
                                 bool weighted = false);

struct StepResult {
  StepEstimate estimate;
  TrackState state;
};

// One localization step. Without a previous estimate the prior is uniform;
// otherwise it is the configured window around it. The returned state holds
// this step's estimate as the next previous location.
StepResult step(const RadioMap& map, const TrackState& state, const ScanSet& scans,
                const TrackConfig& config);

// Replaces the stored previous location before the prior is built. Receives
// the index of the step about to run and the stored previous estimate.
using HistoryTransform = std::function<Location(std::size_t step_index, const Location& previous)>;

struct TrackOptions {
  std::set<std::size_t> alignment_steps;  // memory is cleared before these steps
  HistoryTransform history;               // optional
  std::vector<double>* step_seconds = nullptr;  // wall time of each step() call
};

std::vector<StepEstimate> track(const RadioMap& map, std::span<const ScanSet> trajectory,
                                const TrackConfig& config, const TrackOptions& options = {});

}  // namespace ssploc
