#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fingerprint.hpp"
#include "likelihood.hpp"

namespace ssploc {

struct ReferencePoint {
  std::int64_t id = 0;
  Location location;
  std::vector<LikelihoodModel> models;  // one per feature
};

// The fingerprint database. RP order is fixed at construction and defines
// the index used by every posterior vector. Immutable once built.
class RadioMap {
 public:
  // Throws a data error unless M >= 1, ids are unique, and every RP carries
  // exactly N >= 1 models.
  RadioMap(std::vector<ReferencePoint> rps, ModelFamily family, double grid_size = 0.0,
           std::size_t ap_count = 0);

  std::size_t rp_count() const noexcept { return rps_.size(); }
  std::size_t feature_count() const noexcept { return feature_count_; }
  ModelFamily family() const noexcept { return family_; }
  double grid_size() const noexcept { return grid_size_; }
  std::size_t ap_count() const noexcept { return ap_count_; }

  const std::vector<ReferencePoint>& rps() const noexcept { return rps_; }
  const ReferencePoint& rp(std::size_t index) const { return rps_.at(index); }
  const LikelihoodModel& model(std::size_t rp, std::size_t feature) const {
    return rps_.at(rp).models.at(feature);
  }
  // Largest distance between any two RPs.
  double diameter() const;

 private:
  std::vector<ReferencePoint> rps_;
  std::size_t feature_count_ = 0;
  ModelFamily family_;
  double grid_size_;
  std::size_t ap_count_;
};

struct TrainingOptions {
  ModelFamily family = ModelFamily::single_gaussian;
  FitOptions fit;
  double grid_size = 0.0;   // metadata only
  std::size_t ap_count = 0;  // metadata only
};

// Fits one model per (RP, feature) from training scans. Missing readings are
// imputed with kMissingRssiDbm. rp_ids defaults to 0..M-1. Duplicate RP
// locations are kept and reported through `warnings` when given.
RadioMap build_radio_map(std::span<const ScanSet> training, const TrainingOptions& options,
                         std::span<const std::int64_t> rp_ids = {},
                         std::vector<std::string>* warnings = nullptr);

struct CsiTrainingPoint {
  std::int64_t rp_id = 0;
  Location location;
  CsiMatrix matrix;
};

// Reduces every CSI matrix to per-measurement power and fits the
// csi_power_gaussian family.
RadioMap build_csi_radio_map(std::span<const CsiTrainingPoint> training, double grid_size = 0.0,
                             std::size_t ap_count = 1);

}  // namespace ssploc
