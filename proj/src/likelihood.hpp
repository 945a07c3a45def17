#pragma once

// Per-(RP, feature) density models P(F_k | l_i): two parametric Gaussian
// families, a left-skew lognormal, a smoothed histogram and a Gaussian
// Parzen estimate. Every model is floored so no query evaluates to zero.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ssploc {

inline constexpr double kSigmaFloor = 0.5;         // dBm (or feature units)
inline constexpr double kDensityFloor = 1e-12;     // evaluate() never returns less
inline constexpr double kBinPseudoCount = 0.5;     // additive smoothing per histogram bin
inline constexpr double kBandwidthFloor = 0.5;     // Parzen bandwidth floor
inline constexpr double kDefaultBinWidth = 10.0;   // dB
inline constexpr double kLognormalShiftMargin = 1.0;  // shift = max sample + margin

enum class ModelFamily {
  single_gaussian,
  double_gaussian,
  lognormal,
  histogram,
  kernel,
  csi_power_gaussian,
};

std::string_view to_string(ModelFamily family);
// Accepts canonical names plus the aliases horus, dgd, parzen and fila.
std::optional<ModelFamily> parse_model_family(std::string_view name);

struct GaussianParams {
  double mean = 0.0;
  double std = kSigmaFloor;
};

struct MixtureParams {
  std::array<double, 2> weights{0.5, 0.5};
  std::array<double, 2> means{};
  std::array<double, 2> stds{kSigmaFloor, kSigmaFloor};
  bool fallback = false;  // EM was abandoned; component 0 holds the single-Gaussian fit
};

// Density of x is lognormal in u = shift - x (left-skewed in x).
struct LogNormalParams {
  double shift = 0.0;
  double log_mean = 0.0;
  double log_std = 1.0;
};

// Bin j covers [(first_bin + j) * bin_width, (first_bin + j + 1) * bin_width).
struct HistogramParams {
  double bin_width = kDefaultBinWidth;
  std::int64_t first_bin = 0;
  std::vector<double> probabilities;
};

struct KernelParams {
  std::vector<double> samples;  // sorted ascending
  double bandwidth = kBandwidthFloor;
};

class LikelihoodModel {
 public:
  using Params =
      std::variant<GaussianParams, MixtureParams, LogNormalParams, HistogramParams, KernelParams>;

  // Validates the invariants of the parameter set and that it matches the
  // family; throws a data error otherwise.
  LikelihoodModel(ModelFamily family, Params params);

  ModelFamily family() const noexcept { return family_; }
  const Params& params() const noexcept { return params_; }

  // Density at x, never below kDensityFloor. Throws on non-finite x.
  double evaluate(double x) const;
  // max(ln density, ln kDensityFloor), computed without underflow for the
  // parametric families.
  double log_evaluate(double x) const;

 private:
  ModelFamily family_;
  Params params_;
};

struct FitOptions {
  double bin_width = kDefaultBinWidth;
  std::optional<double> bandwidth;  // Silverman's rule when absent
};

// Log-likelihood after initialisation and after every EM iteration.
struct MixtureFitTrace {
  std::vector<double> log_likelihoods;
  bool fell_back = false;
  std::string fallback_reason;
};

LikelihoodModel fit_single_gaussian(std::span<const double> samples);
LikelihoodModel fit_double_gaussian(std::span<const double> samples,
                                    MixtureFitTrace* trace = nullptr);
LikelihoodModel fit_lognormal(std::span<const double> samples);
LikelihoodModel fit_histogram(std::span<const double> samples, double bin_width = kDefaultBinWidth);
LikelihoodModel fit_kernel(std::span<const double> samples,
                           std::optional<double> bandwidth = std::nullopt);
LikelihoodModel fit_csi_power_gaussian(std::span<const double> powers);

LikelihoodModel fit_model(ModelFamily family, std::span<const double> samples,
                          const FitOptions& options = {});

double evaluate(const LikelihoodModel& model, double x);

// Sum of log_evaluate over samples.
double data_log_likelihood(const LikelihoodModel& model, std::span<const double> samples);

// 1.06 * sigma * n^(-1/5), floored at kBandwidthFloor.
double silverman_bandwidth(std::span<const double> samples);

// Population (1/n) mean and standard deviation.
double sample_mean(std::span<const double> samples);
double population_std(std::span<const double> samples);

}  // namespace ssploc
