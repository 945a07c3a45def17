#include "fingerprint.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace ssploc {

double euclidean_distance(const Location& a, const Location& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

FeatureVector::FeatureVector(std::vector<double> values) {
  readings_.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) throw_data("feature reading is not finite");
    readings_.emplace_back(v);
  }
}

FeatureVector::FeatureVector(std::vector<std::optional<double>> readings)
    : readings_(std::move(readings)) {
  for (const auto& r : readings_) {
    if (r && !std::isfinite(*r)) throw_data("feature reading is not finite");
  }
}

std::size_t FeatureVector::missing_count() const noexcept {
  std::size_t n = 0;
  for (const auto& r : readings_) n += r ? 0 : 1;
  return n;
}

void ScanSet::validate() const {
  if (scans.empty()) throw_data("scan set has no scans");
  const std::size_t n = scans.front().size();
  if (n == 0) throw_data("scan has no features");
  for (std::size_t i = 1; i < scans.size(); ++i) {
    if (scans[i].size() != n) {
      throw_data("scan " + std::to_string(i) + " has " + std::to_string(scans[i].size()) +
                 " features, expected " + std::to_string(n));
    }
  }
}

CsiMatrix::CsiMatrix(std::size_t rows, std::size_t cols, std::vector<double> amplitudes)
    : rows_(rows), cols_(cols), amplitudes_(std::move(amplitudes)) {
  if (rows_ == 0 || cols_ == 0) throw_data("CSI matrix must have H >= 1 and W >= 1");
  if (amplitudes_.size() != rows_ * cols_) {
    throw_data("CSI matrix has " + std::to_string(amplitudes_.size()) + " entries, expected " +
               std::to_string(rows_ * cols_));
  }
  for (double a : amplitudes_) {
    if (!std::isfinite(a) || a < 0.0) throw_data("CSI amplitudes must be finite and non-negative");
  }
}

namespace {

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  if (rows.empty()) return flat;
  const std::size_t cols = rows.front().size();
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw_data("CSI matrix rows have differing lengths");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return flat;
}

}  // namespace

CsiMatrix::CsiMatrix(const std::vector<std::vector<double>>& rows)
    : CsiMatrix(rows.size(), rows.empty() ? 0 : rows.front().size(), flatten(rows)) {}

std::span<const double> CsiMatrix::row(std::size_t index) const {
  if (index >= rows_) {
    throw_argument("CSI row index " + std::to_string(index) + " out of range (H=" +
                   std::to_string(rows_) + ")");
  }
  return std::span<const double>(amplitudes_).subspan(index * cols_, cols_);
}

double csi_effective_power(const CsiMatrix& m, std::size_t row_index) {
  double power = 0.0;
  for (double a : m.row(row_index)) power += a * a;
  return power;
}

ScanSet csi_to_scanset(const CsiMatrix& m, std::optional<Location> location) {
  ScanSet set;
  set.location = location;
  set.scans.reserve(m.rows());
  for (std::size_t h = 0; h < m.rows(); ++h) {
    set.scans.emplace_back(std::vector<double>{csi_effective_power(m, h)});
  }
  return set;
}

}  // namespace ssploc
