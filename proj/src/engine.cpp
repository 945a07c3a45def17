#include "engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "error.hpp"

namespace ssploc {

std::string_view to_string(WindowFamily family) {
  switch (family) {
    case WindowFamily::circular: return "circular";
    case WindowFamily::gaussian: return "gaussian";
    case WindowFamily::hann: return "hann";
    case WindowFamily::tukey: return "tukey";
    case WindowFamily::uniform: return "uniform";
  }
  return "unknown";
}

std::optional<WindowFamily> parse_window_family(std::string_view name) {
  if (name == "circular") return WindowFamily::circular;
  if (name == "gaussian") return WindowFamily::gaussian;
  if (name == "hann") return WindowFamily::hann;
  if (name == "tukey") return WindowFamily::tukey;
  if (name == "uniform" || name == "none" || name == "memoryless") return WindowFamily::uniform;
  return std::nullopt;
}

std::string_view to_string(MatchingMode mode) {
  switch (mode) {
    case MatchingMode::per_scan_product: return "per_scan_product";
    case MatchingMode::mean_scan: return "mean_scan";
  }
  return "unknown";
}

std::optional<MatchingMode> parse_matching_mode(std::string_view name) {
  if (name == "per_scan_product") return MatchingMode::per_scan_product;
  if (name == "mean_scan") return MatchingMode::mean_scan;
  return std::nullopt;
}

void PriorWindow::validate() const {
  if (family == WindowFamily::uniform) return;
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw_argument("window sigma must be finite and > 0, got " + std::to_string(sigma));
  }
}

double window_prob(const PriorWindow& window, double d) {
  if (!(d >= 0.0)) throw_argument("window distance must be >= 0");
  window.validate();
  const double s = window.sigma;
  switch (window.family) {
    case WindowFamily::circular: return d <= s ? 1.0 : 0.0;
    case WindowFamily::gaussian: return std::exp(-(d * d) / (2.0 * s * s));
    case WindowFamily::hann: {
      const double c = std::cos(std::numbers::pi * d / (2.0 * (d + s)));
      return c * c;
    }
    case WindowFamily::tukey:
      if (d < s) return 1.0;
      return 0.5 * (1.0 + std::cos(std::numbers::pi * d / (2.0 * (d + s))));
    case WindowFamily::uniform: return 1.0;
  }
  throw_internal("unhandled window family");
}

std::vector<double> uniform_prior(std::size_t m) {
  if (m == 0) throw_argument("prior over an empty map");
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

std::optional<std::vector<double>> prior_over_map(const RadioMap& map, const Location& previous,
                                                  const PriorWindow& window) {
  window.validate();
  std::vector<double> weights;
  weights.reserve(map.rp_count());
  double total = 0.0;
  for (const auto& rp : map.rps()) {
    const double w = window_prob(window, euclidean_distance(rp.location, previous));
    weights.push_back(w);
    total += w;
  }
  if (!(total > 0.0)) return std::nullopt;
  for (double& w : weights) w /= total;
  return weights;
}

std::vector<double> log_likelihood_over_map(const RadioMap& map, const ScanSet& scans,
                                            MatchingMode mode) {
  scans.validate();
  const std::size_t n = map.feature_count();
  if (scans.feature_count() != n) {
    throw_data("scan has " + std::to_string(scans.feature_count()) + " features, radio map has " +
               std::to_string(n));
  }

  // Imputed readings, one row per scan used for matching.
  std::vector<double> readings;
  if (mode == MatchingMode::mean_scan) {
    readings.assign(n, 0.0);
    for (const auto& scan : scans.scans) {
      for (std::size_t k = 0; k < n; ++k) readings[k] += scan.value_or_sentinel(k);
    }
    for (double& r : readings) r /= static_cast<double>(scans.scan_count());
  } else {
    readings.reserve(n * scans.scan_count());
    for (const auto& scan : scans.scans) {
      for (std::size_t k = 0; k < n; ++k) readings.push_back(scan.value_or_sentinel(k));
    }
  }

  std::vector<double> out(map.rp_count(), 0.0);
  for (std::size_t i = 0; i < map.rp_count(); ++i) {
    const auto& models = map.rp(i).models;
    double total = 0.0;
    for (std::size_t r = 0; r < readings.size(); ++r) total += models[r % n].log_evaluate(readings[r]);
    out[i] = total;
  }
  return out;
}

std::vector<double> posterior(std::span<const double> log_likelihoods, std::span<const double> prior) {
  if (log_likelihoods.size() != prior.size()) {
    throw_argument("log-likelihood and prior lengths differ");
  }
  if (prior.empty()) throw_argument("posterior over an empty map");

  const double neg_inf = -std::numeric_limits<double>::infinity();
  double prior_peak = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0)) throw_argument("prior entries must be >= 0");
    prior_peak = std::max(prior_peak, p);
  }
  if (prior_peak == 0.0) throw_argument("prior is zero everywhere");
  // Relative to the largest entry, so a flat prior adds exactly zero and the
  // result matches memoryless_posterior bit for bit.
  const double log_prior_peak = std::log(prior_peak);

  std::vector<double> out(prior.size());
  double peak = neg_inf;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (std::isnan(log_likelihoods[i])) throw_argument("log-likelihood is NaN");
    out[i] = prior[i] > 0.0 ? log_likelihoods[i] + (std::log(prior[i]) - log_prior_peak) : neg_inf;
    peak = std::max(peak, out[i]);
  }

  double total = 0.0;
  for (double& v : out) {
    v = v == neg_inf ? 0.0 : std::exp(v - peak);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> memoryless_posterior(std::span<const double> log_likelihoods) {
  if (log_likelihoods.empty()) throw_argument("posterior over an empty map");
  double peak = -std::numeric_limits<double>::infinity();
  for (double ll : log_likelihoods) {
    if (std::isnan(ll)) throw_argument("log-likelihood is NaN");
    peak = std::max(peak, ll);
  }
  std::vector<double> out(log_likelihoods.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(log_likelihoods[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

StepEstimate localize_memoryless(const RadioMap& map, const ScanSet& scans, std::size_t top_k,
                                 MatchingMode matching, bool weighted) {
  StepEstimate est;
  est.log_likelihoods = log_likelihood_over_map(map, scans, matching);
  est.posterior = memoryless_posterior(est.log_likelihoods);
  auto located = estimate_location(map, est.posterior, top_k, weighted);
  est.estimate = located.location;
  est.top_k_ids = std::move(located.top_k_ids);
  return est;
}

LocationEstimate estimate_location(const RadioMap& map, std::span<const double> post,
                                   std::size_t top_k, bool weighted) {
  const std::size_t m = map.rp_count();
  if (post.size() != m) throw_argument("posterior length does not match the radio map");
  if (top_k < 1 || top_k > m) {
    throw_argument("top_k must be in [1, " + std::to_string(m) + "], got " + std::to_string(top_k));
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](std::size_t a, std::size_t b) {
    if (post[a] != post[b]) return post[a] > post[b];
    return map.rp(a).id < map.rp(b).id;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_k), order.end(),
                    better);

  LocationEstimate result;
  result.top_k_ids.reserve(top_k);
  double sx = 0.0;
  double sy = 0.0;
  double mass = 0.0;
  for (std::size_t j = 0; j < top_k; ++j) {
    const auto& rp = map.rp(order[j]);
    const double w = weighted ? post[order[j]] : 1.0;
    sx += w * rp.location.x;
    sy += w * rp.location.y;
    mass += w;
    result.top_k_ids.push_back(rp.id);
  }
  if (!(mass > 0.0)) {
    // All selected RPs carry zero posterior; fall back to the plain mean.
    return estimate_location(map, post, top_k, false);
  }
  result.location = {sx / mass, sy / mass};
  return result;
}

void TrackConfig::validate() const {
  window.validate();
  if (!std::isfinite(v_max) || v_max <= 0.0) throw_argument("v_max must be > 0");
  if (!std::isfinite(delta_t) || delta_t <= 0.0) throw_argument("delta_t must be > 0");
  if (top_k < 1) throw_argument("top_k must be >= 1");
}

StepResult step(const RadioMap& map, const TrackState& state, const ScanSet& scans,
                const TrackConfig& config) {
  StepResult result;
  StepEstimate& est = result.estimate;
  est.step_index = state.step_index;
  est.log_likelihoods = log_likelihood_over_map(map, scans, config.matching);

  std::vector<double> prior;
  if (state.previous_estimate) {
    auto windowed = prior_over_map(map, *state.previous_estimate, config.window);
    if (windowed) {
      prior = std::move(*windowed);
    } else {
      est.flags |= kFlagEmptyPriorSupport;
      prior = uniform_prior(map.rp_count());
    }
  } else {
    prior = uniform_prior(map.rp_count());
  }

  est.posterior = posterior(est.log_likelihoods, prior);
  auto located = estimate_location(map, est.posterior, config.top_k, config.weighted_top_k);
  est.estimate = located.location;
  est.top_k_ids = std::move(located.top_k_ids);

  result.state.previous_estimate = est.estimate;
  result.state.step_index = state.step_index + 1;
  return result;
}

std::vector<StepEstimate> track(const RadioMap& map, std::span<const ScanSet> trajectory,
                                const TrackConfig& config, const TrackOptions& options) {
  if (trajectory.empty()) throw_argument("trajectory has no steps");
  config.validate();
  if (config.top_k > map.rp_count()) throw_argument("top_k exceeds the number of RPs");

  using clock = std::chrono::steady_clock;
  std::vector<StepEstimate> out;
  out.reserve(trajectory.size());
  if (options.step_seconds) options.step_seconds->clear();

  TrackState state;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    unsigned extra = 0;
    if (options.alignment_steps.contains(t)) {
      state.previous_estimate.reset();
      extra |= kFlagAligned;
    } else if (state.previous_estimate && options.history) {
      state.previous_estimate = options.history(t, *state.previous_estimate);
      extra |= kFlagHistoryPerturbed;
    }
    const auto start = clock::now();
    StepResult r = step(map, state, trajectory[t], config);
    const auto stop = clock::now();
    if (options.step_seconds) {
      options.step_seconds->push_back(std::chrono::duration<double>(stop - start).count());
    }
    r.estimate.flags |= extra;
    out.push_back(std::move(r.estimate));
    state = r.state;
  }
  return out;
}

}  // namespace ssploc
