#pragma once

// Core domain types: locations, fingerprint vectors, scan collections and
// CSI amplitude matrices.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ssploc {

// Readings for an AP that was not heard are imputed with this floor (dBm)
// before training and matching.
inline constexpr double kMissingRssiDbm = -100.0;

struct Location {
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  bool operator==(const Location&) const = default;
};

double euclidean_distance(const Location& a, const Location& b);

// One scan: N feature readings, each either present or explicitly missing.
class FeatureVector {
 public:
  FeatureVector() = default;
  // All readings present; values must be finite.
  explicit FeatureVector(std::vector<double> values);
  // nullopt marks a missing reading; present values must be finite.
  explicit FeatureVector(std::vector<std::optional<double>> readings);

  std::size_t size() const noexcept { return readings_.size(); }
  bool missing(std::size_t k) const { return !readings_.at(k).has_value(); }
  const std::optional<double>& reading(std::size_t k) const { return readings_.at(k); }
  // The reading, or kMissingRssiDbm when missing.
  double value_or_sentinel(std::size_t k) const {
    return readings_.at(k).value_or(kMissingRssiDbm);
  }
  std::size_t missing_count() const noexcept;

  bool operator==(const FeatureVector&) const = default;

 private:
  std::vector<std::optional<double>> readings_;
};

// Repeated scans taken at one place. Training sets carry a known location,
// testing sets do not.
struct ScanSet {
  std::optional<Location> location;
  std::vector<FeatureVector> scans;

  std::size_t scan_count() const noexcept { return scans.size(); }
  // N of the first scan, 0 when there are no scans.
  std::size_t feature_count() const noexcept {
    return scans.empty() ? 0 : scans.front().size();
  }
  // Throws a data error unless there is at least one scan, N >= 1, and all
  // scans share N.
  void validate() const;

  bool operator==(const ScanSet&) const = default;
};

// H x W matrix of CSI amplitudes (rows: measurements, cols: subcarriers).
class CsiMatrix {
 public:
  // Row-major amplitudes; all entries must be finite and >= 0.
  CsiMatrix(std::size_t rows, std::size_t cols, std::vector<double> amplitudes);
  explicit CsiMatrix(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t row, std::size_t col) const { return amplitudes_.at(row * cols_ + col); }
  std::span<const double> row(std::size_t index) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> amplitudes_;
};

// Total power of one CSI measurement: sum of squared subcarrier amplitudes.
double csi_effective_power(const CsiMatrix& m, std::size_t row_index);

// One single-feature scan per CSI row, holding that row's effective power.
ScanSet csi_to_scanset(const CsiMatrix& m, std::optional<Location> location = std::nullopt);

}  // namespace ssploc
