#include "likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"

namespace ssploc {

namespace {

constexpr double kLogDensityFloor = -27.631021115928547;  // ln(1e-12)
constexpr double kHalfLogTwoPi = 0.91893853320467274178;   // ln(sqrt(2 pi))
constexpr double kInvSqrtTwoPi = 0.39894228040143267794;
// Kernel terms further than this many bandwidths away are below 1e-31 of the
// peak and are skipped.
constexpr double kKernelCutoff = 12.0;

constexpr int kEmMaxIterations = 100;
constexpr double kEmTolerance = 1e-6;
constexpr double kEmMinWeight = 0.01;

void require_samples(std::span<const double> samples, std::size_t min_count, const char* what) {
  if (samples.size() < min_count) {
    throw_argument(std::string(what) + " needs at least " + std::to_string(min_count) +
                   " sample(s), got " + std::to_string(samples.size()));
  }
  for (double s : samples) {
    if (!std::isfinite(s)) throw_argument(std::string(what) + ": sample is not finite");
  }
}

double gaussian_log_density(double x, double mean, double std) {
  const double z = (x - mean) / std;
  return -0.5 * z * z - std::log(std) - kHalfLogTwoPi;
}

double gaussian_density(double x, double mean, double std) {
  const double z = (x - mean) / std;
  return kInvSqrtTwoPi / std * std::exp(-0.5 * z * z);
}

double mixture_log_density(const MixtureParams& p, double x) {
  double terms[2];
  int used = 0;
  for (int j = 0; j < 2; ++j) {
    if (p.weights[j] <= 0.0) continue;
    terms[used++] = std::log(p.weights[j]) + gaussian_log_density(x, p.means[j], p.stds[j]);
  }
  if (used == 1) return terms[0];
  const double hi = std::max(terms[0], terms[1]);
  return hi + std::log(std::exp(terms[0] - hi) + std::exp(terms[1] - hi));
}

double lognormal_log_density(const LogNormalParams& p, double x) {
  const double u = p.shift - x;
  if (!(u > 0.0)) return -std::numeric_limits<double>::infinity();
  const double lu = std::log(u);
  const double z = (lu - p.log_mean) / p.log_std;
  return -0.5 * z * z - lu - std::log(p.log_std) - kHalfLogTwoPi;
}

double histogram_density(const HistogramParams& p, double x) {
  const auto bin = static_cast<std::int64_t>(std::floor(x / p.bin_width)) - p.first_bin;
  if (bin < 0 || bin >= static_cast<std::int64_t>(p.probabilities.size())) return 0.0;
  return p.probabilities[static_cast<std::size_t>(bin)] / p.bin_width;
}

double kernel_density(const KernelParams& p, double x) {
  const double h = p.bandwidth;
  const auto lo = std::lower_bound(p.samples.begin(), p.samples.end(), x - kKernelCutoff * h);
  const auto hi = std::upper_bound(lo, p.samples.end(), x + kKernelCutoff * h);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double z = (x - *it) / h;
    sum += std::exp(-0.5 * z * z);
  }
  return sum * kInvSqrtTwoPi / (static_cast<double>(p.samples.size()) * h);
}

void check_std(double s, const char* what) {
  if (!std::isfinite(s) || s < kSigmaFloor) {
    throw_data(std::string(what) + " standard deviation must be >= " + std::to_string(kSigmaFloor));
  }
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw_data(std::string(what) + " must be finite");
}

struct Validator {
  ModelFamily family;

  void operator()(const GaussianParams& p) const {
    if (family != ModelFamily::single_gaussian && family != ModelFamily::csi_power_gaussian) {
      throw_data("Gaussian parameters given for family " + std::string(to_string(family)));
    }
    check_finite(p.mean, "mean");
    check_std(p.std, "Gaussian");
  }
  void operator()(const MixtureParams& p) const {
    if (family != ModelFamily::double_gaussian) {
      throw_data("mixture parameters given for family " + std::string(to_string(family)));
    }
    for (int j = 0; j < 2; ++j) {
      if (!(p.weights[j] >= 0.0 && p.weights[j] <= 1.0)) throw_data("mixture weight outside [0,1]");
      check_finite(p.means[j], "mixture mean");
      check_std(p.stds[j], "mixture component");
    }
    if (std::abs(p.weights[0] + p.weights[1] - 1.0) > 1e-9) throw_data("mixture weights do not sum to 1");
  }
  void operator()(const LogNormalParams& p) const {
    if (family != ModelFamily::lognormal) {
      throw_data("lognormal parameters given for family " + std::string(to_string(family)));
    }
    check_finite(p.shift, "lognormal shift");
    check_finite(p.log_mean, "lognormal log-mean");
    if (!std::isfinite(p.log_std) || p.log_std <= 0.0) throw_data("lognormal log-std must be > 0");
  }
  void operator()(const HistogramParams& p) const {
    if (family != ModelFamily::histogram) {
      throw_data("histogram parameters given for family " + std::string(to_string(family)));
    }
    if (!std::isfinite(p.bin_width) || p.bin_width <= 0.0) throw_data("histogram bin width must be > 0");
    if (p.probabilities.empty()) throw_data("histogram has no bins");
    double total = 0.0;
    for (double q : p.probabilities) {
      if (!std::isfinite(q) || q <= 0.0 || q > 1.0) throw_data("histogram bin probability outside (0,1]");
      total += q;
    }
    if (std::abs(total - 1.0) > 1e-9) throw_data("histogram bin probabilities do not sum to 1");
  }
  void operator()(const KernelParams& p) const {
    if (family != ModelFamily::kernel) {
      throw_data("kernel parameters given for family " + std::string(to_string(family)));
    }
    if (p.samples.empty()) throw_data("kernel model has no samples");
    for (double s : p.samples) check_finite(s, "kernel sample");
    if (!std::is_sorted(p.samples.begin(), p.samples.end())) throw_data("kernel samples must be sorted");
    if (!std::isfinite(p.bandwidth) || p.bandwidth <= 0.0) throw_data("kernel bandwidth must be > 0");
  }
};

GaussianParams gaussian_fit(std::span<const double> samples) {
  return {sample_mean(samples), std::max(population_std(samples), kSigmaFloor)};
}

// Linear interpolation between order statistics at (n - 1) * q.
double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double raw_mixture_log_likelihood(std::span<const double> samples, const std::array<double, 2>& w,
                                  const std::array<double, 2>& mu, const std::array<double, 2>& sd) {
  MixtureParams p;
  p.weights = w;
  p.means = mu;
  p.stds = sd;
  double total = 0.0;
  for (double x : samples) total += mixture_log_density(p, x);
  return total;
}

}  // namespace

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::single_gaussian: return "single_gaussian";
    case ModelFamily::double_gaussian: return "double_gaussian";
    case ModelFamily::lognormal: return "lognormal";
    case ModelFamily::histogram: return "histogram";
    case ModelFamily::kernel: return "kernel";
    case ModelFamily::csi_power_gaussian: return "csi_power_gaussian";
  }
  return "unknown";
}

std::optional<ModelFamily> parse_model_family(std::string_view name) {
  if (name == "single_gaussian" || name == "horus") return ModelFamily::single_gaussian;
  if (name == "double_gaussian" || name == "dgd") return ModelFamily::double_gaussian;
  if (name == "lognormal") return ModelFamily::lognormal;
  if (name == "histogram") return ModelFamily::histogram;
  if (name == "kernel" || name == "parzen") return ModelFamily::kernel;
  if (name == "csi_power_gaussian" || name == "fila") return ModelFamily::csi_power_gaussian;
  return std::nullopt;
}

LikelihoodModel::LikelihoodModel(ModelFamily family, Params params)
    : family_(family), params_(std::move(params)) {
  std::visit(Validator{family_}, params_);
}

double LikelihoodModel::evaluate(double x) const {
  if (!std::isfinite(x)) throw_argument("likelihood query is not finite");
  double density = 0.0;
  switch (params_.index()) {
    case 0: {
      const auto& p = std::get<GaussianParams>(params_);
      density = gaussian_density(x, p.mean, p.std);
      break;
    }
    case 1: {
      const auto& p = std::get<MixtureParams>(params_);
      density = p.weights[0] * gaussian_density(x, p.means[0], p.stds[0]) +
                p.weights[1] * gaussian_density(x, p.means[1], p.stds[1]);
      break;
    }
    case 2: density = std::exp(lognormal_log_density(std::get<LogNormalParams>(params_), x)); break;
    case 3: density = histogram_density(std::get<HistogramParams>(params_), x); break;
    case 4: density = kernel_density(std::get<KernelParams>(params_), x); break;
  }
  return std::max(density, kDensityFloor);
}

double LikelihoodModel::log_evaluate(double x) const {
  if (!std::isfinite(x)) throw_argument("likelihood query is not finite");
  double log_density = kLogDensityFloor;
  switch (params_.index()) {
    case 0: {
      const auto& p = std::get<GaussianParams>(params_);
      log_density = gaussian_log_density(x, p.mean, p.std);
      break;
    }
    case 1: log_density = mixture_log_density(std::get<MixtureParams>(params_), x); break;
    case 2: log_density = lognormal_log_density(std::get<LogNormalParams>(params_), x); break;
    case 3: {
      const double d = histogram_density(std::get<HistogramParams>(params_), x);
      if (d > 0.0) log_density = std::log(d);
      break;
    }
    case 4: {
      const double d = kernel_density(std::get<KernelParams>(params_), x);
      if (d > 0.0) log_density = std::log(d);
      break;
    }
  }
  return std::max(log_density, kLogDensityFloor);
}

double evaluate(const LikelihoodModel& model, double x) { return model.evaluate(x); }

double data_log_likelihood(const LikelihoodModel& model, std::span<const double> samples) {
  double total = 0.0;
  for (double x : samples) total += model.log_evaluate(x);
  return total;
}

double sample_mean(std::span<const double> samples) {
  if (samples.empty()) throw_argument("mean of empty sample list");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double population_std(std::span<const double> samples) {
  const double mean = sample_mean(samples);
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / static_cast<double>(samples.size()));
}

double silverman_bandwidth(std::span<const double> samples) {
  const double n = static_cast<double>(samples.size());
  const double h = 1.06 * population_std(samples) * std::pow(n, -0.2);
  return std::max(h, kBandwidthFloor);
}

LikelihoodModel fit_single_gaussian(std::span<const double> samples) {
  require_samples(samples, 1, "single Gaussian fit");
  return LikelihoodModel(ModelFamily::single_gaussian, gaussian_fit(samples));
}

LikelihoodModel fit_csi_power_gaussian(std::span<const double> powers) {
  require_samples(powers, 1, "CSI power Gaussian fit");
  return LikelihoodModel(ModelFamily::csi_power_gaussian, gaussian_fit(powers));
}

LikelihoodModel fit_double_gaussian(std::span<const double> samples, MixtureFitTrace* trace) {
  require_samples(samples, 2, "double Gaussian fit");
  MixtureFitTrace local;
  MixtureFitTrace& tr = trace ? *trace : local;
  tr = MixtureFitTrace{};

  const GaussianParams single = gaussian_fit(samples);
  auto fallback = [&](std::string reason) {
    tr.fell_back = true;
    tr.fallback_reason = std::move(reason);
    MixtureParams p;
    p.weights = {1.0, 0.0};
    p.means = {single.mean, single.mean};
    p.stds = {single.std, single.std};
    p.fallback = true;
    return LikelihoodModel(ModelFamily::double_gaussian, p);
  };

  const double spread = population_std(samples);
  if (spread < kSigmaFloor / 10.0) return fallback("degenerate sample spread");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::array<double, 2> w{0.5, 0.5};
  std::array<double, 2> mu{percentile(sorted, 0.25), percentile(sorted, 0.75)};
  std::array<double, 2> sd{spread, spread};

  const std::size_t n = samples.size();
  std::vector<double> resp(n);  // responsibility of component 0
  double ll = raw_mixture_log_likelihood(samples, w, mu, sd);
  tr.log_likelihoods.push_back(ll);

  for (int iter = 0; iter < kEmMaxIterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::log(w[0]) + gaussian_log_density(samples[i], mu[0], sd[0]);
      const double b = std::log(w[1]) + gaussian_log_density(samples[i], mu[1], sd[1]);
      const double hi = std::max(a, b);
      const double ea = std::exp(a - hi);
      resp[i] = ea / (ea + std::exp(b - hi));
    }
    std::array<double, 2> count{0.0, 0.0};
    std::array<double, 2> sum{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      count[0] += resp[i];
      count[1] += 1.0 - resp[i];
      sum[0] += resp[i] * samples[i];
      sum[1] += (1.0 - resp[i]) * samples[i];
    }
    for (int j = 0; j < 2; ++j) {
      w[j] = count[j] / static_cast<double>(n);
      if (w[j] < kEmMinWeight) return fallback("component weight collapsed");
      mu[j] = sum[j] / count[j];
    }
    std::array<double, 2> ss{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double d0 = samples[i] - mu[0];
      const double d1 = samples[i] - mu[1];
      ss[0] += resp[i] * d0 * d0;
      ss[1] += (1.0 - resp[i]) * d1 * d1;
    }
    for (int j = 0; j < 2; ++j) {
      sd[j] = std::sqrt(ss[j] / count[j]);
      if (sd[j] < kSigmaFloor / 10.0) return fallback("component variance collapsed");
    }
    const double next = raw_mixture_log_likelihood(samples, w, mu, sd);
    tr.log_likelihoods.push_back(next);
    const double gain = next - ll;
    ll = next;
    if (gain < kEmTolerance) break;
  }

  MixtureParams p;
  p.weights = {w[0], 1.0 - w[0]};
  p.means = mu;
  p.stds = {std::max(sd[0], kSigmaFloor), std::max(sd[1], kSigmaFloor)};
  LikelihoodModel mixture(ModelFamily::double_gaussian, p);

  // Flooring can cost likelihood; never return something worse than the
  // nested single-component model.
  const LikelihoodModel one(ModelFamily::single_gaussian, single);
  if (data_log_likelihood(mixture, samples) < data_log_likelihood(one, samples)) {
    return fallback("mixture does not improve on single Gaussian");
  }
  return mixture;
}

namespace {

struct LogFit {
  double m, s, ll;
};

// Moments of log(shift - x) and the profile log-likelihood at that shift.
LogFit log_moments(std::span<const double> samples, double shift) {
  std::vector<double> logs;
  logs.reserve(samples.size());
  for (double x : samples) logs.push_back(std::log(shift - x));
  const double m = sample_mean(logs);
  const double s = std::max(population_std(logs), 1e-12);
  double sum_log = 0;
  for (double l : logs) sum_log += l;
  return {m, s, -static_cast<double>(logs.size()) * std::log(s) - sum_log};
}

}  // namespace

LikelihoodModel fit_lognormal(std::span<const double> samples) {
  require_samples(samples, 1, "lognormal fit");
  const double top = *std::max_element(samples.begin(), samples.end());
  // Profile the shift over [top + margin, top + margin + span]; the likelihood
  // is unbounded as the shift approaches the top sample, hence the margin.
  const double span = std::max(10.0, 10.0 * population_std(samples));
  auto score = [&](double offset) { return log_moments(samples, top + kLognormalShiftMargin + offset).ll; };
  constexpr int kGrid = 200;
  int best = 0;
  double best_ll = score(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double ll = score(span * i / kGrid);
    if (ll > best_ll) best_ll = ll, best = i;
  }
  double lo = span * std::max(0, best - 1) / kGrid, hi = span * std::min(kGrid, best + 1) / kGrid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (score(a) >= score(b)) hi = b; else lo = a;
  }
  double offset = 0.5 * (lo + hi);
  if (score(0.0) >= score(offset)) offset = 0.0;
  const double shift = top + kLognormalShiftMargin + offset;
  const auto fit = log_moments(samples, shift);
  double m = fit.m;
  double s = samples.size() > 1 ? fit.s : 0.0;
  // Delta method: the spread in x is about exp(m) * s. Keep it at least
  // kSigmaFloor and hold the mode of u at exp(m) when the floor kicks in.
  const double s_min = kSigmaFloor * std::exp(-m);
  if (s < s_min) {
    s = s_min;
    m += s * s;
  }
  return LikelihoodModel(ModelFamily::lognormal, LogNormalParams{shift, m, s});
}

LikelihoodModel fit_histogram(std::span<const double> samples, double bin_width) {
  if (!std::isfinite(bin_width) || bin_width <= 0.0) {
    throw_argument("histogram bin width must be > 0");
  }
  require_samples(samples, 1, "histogram fit");
  auto bin_of = [bin_width](double x) { return static_cast<std::int64_t>(std::floor(x / bin_width)); };
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const std::int64_t first = bin_of(*lo);
  const std::int64_t last = bin_of(*hi);
  std::vector<double> counts(static_cast<std::size_t>(last - first + 1), 0.0);
  for (double x : samples) counts[static_cast<std::size_t>(bin_of(x) - first)] += 1.0;

  const double normalizer =
      static_cast<double>(samples.size()) + kBinPseudoCount * static_cast<double>(counts.size());
  HistogramParams p;
  p.bin_width = bin_width;
  p.first_bin = first;
  p.probabilities.reserve(counts.size());
  for (double c : counts) p.probabilities.push_back((c + kBinPseudoCount) / normalizer);
  return LikelihoodModel(ModelFamily::histogram, std::move(p));
}

LikelihoodModel fit_kernel(std::span<const double> samples, std::optional<double> bandwidth) {
  if (bandwidth && (!std::isfinite(*bandwidth) || *bandwidth <= 0.0)) {
    throw_argument("kernel bandwidth must be > 0");
  }
  require_samples(samples, 1, "kernel fit");
  KernelParams p;
  p.samples.assign(samples.begin(), samples.end());
  std::sort(p.samples.begin(), p.samples.end());
  p.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(samples);
  return LikelihoodModel(ModelFamily::kernel, std::move(p));
}

LikelihoodModel fit_model(ModelFamily family, std::span<const double> samples,
                          const FitOptions& options) {
  switch (family) {
    case ModelFamily::single_gaussian: return fit_single_gaussian(samples);
    case ModelFamily::double_gaussian: return fit_double_gaussian(samples);
    case ModelFamily::lognormal: return fit_lognormal(samples);
    case ModelFamily::histogram: return fit_histogram(samples, options.bin_width);
    case ModelFamily::kernel: return fit_kernel(samples, options.bandwidth);
    case ModelFamily::csi_power_gaussian: return fit_csi_power_gaussian(samples);
  }
  throw_internal("unhandled model family");
}

}  // namespace ssploc
