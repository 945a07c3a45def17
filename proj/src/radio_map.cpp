#include "radio_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "error.hpp"

namespace ssploc {

RadioMap::RadioMap(std::vector<ReferencePoint> rps, ModelFamily family, double grid_size,
                   std::size_t ap_count)
    : rps_(std::move(rps)), family_(family), grid_size_(grid_size), ap_count_(ap_count) {
  if (rps_.empty()) throw_data("radio map needs at least one reference point");
  feature_count_ = rps_.front().models.size();
  if (feature_count_ == 0) throw_data("radio map needs at least one feature");
  std::set<std::int64_t> ids;
  for (const auto& rp : rps_) {
    if (!ids.insert(rp.id).second) throw_data("duplicate rp_id " + std::to_string(rp.id));
    if (rp.models.size() != feature_count_) {
      throw_data("rp " + std::to_string(rp.id) + " has " + std::to_string(rp.models.size()) +
                 " models, expected " + std::to_string(feature_count_));
    }
    if (!std::isfinite(rp.location.x) || !std::isfinite(rp.location.y)) {
      throw_data("rp " + std::to_string(rp.id) + " has a non-finite location");
    }
    for (const auto& m : rp.models) {
      if (m.family() != family_) {
        throw_data("rp " + std::to_string(rp.id) + " holds a " + std::string(to_string(m.family())) +
                   " model in a " + std::string(to_string(family_)) + " map");
      }
    }
  }
}

double RadioMap::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rps_.size(); ++i) {
    for (std::size_t j = i + 1; j < rps_.size(); ++j) {
      best = std::max(best, euclidean_distance(rps_[i].location, rps_[j].location));
    }
  }
  return best;
}

RadioMap build_radio_map(std::span<const ScanSet> training, const TrainingOptions& options,
                         std::span<const std::int64_t> rp_ids, std::vector<std::string>* warnings) {
  if (training.empty()) throw_data("no training scan sets");
  if (!rp_ids.empty() && rp_ids.size() != training.size()) {
    throw_data("rp_ids length does not match the number of training scan sets");
  }
  const std::size_t n = training.front().feature_count();
  std::map<std::pair<double, double>, std::size_t> seen;
  std::vector<ReferencePoint> rps;
  rps.reserve(training.size());
  std::vector<double> column;
  for (std::size_t i = 0; i < training.size(); ++i) {
    const ScanSet& set = training[i];
    set.validate();
    if (set.feature_count() != n) {
      throw_data("training set " + std::to_string(i) + " has " + std::to_string(set.feature_count()) +
                 " features, expected " + std::to_string(n));
    }
    if (!set.location) throw_data("training set " + std::to_string(i) + " has no location");

    ReferencePoint rp;
    rp.id = rp_ids.empty() ? static_cast<std::int64_t>(i) : rp_ids[i];
    rp.location = *set.location;
    auto [it, inserted] = seen.emplace(std::make_pair(rp.location.x, rp.location.y), i);
    if (!inserted && warnings) {
      warnings->push_back("training sets " + std::to_string(it->second) + " and " + std::to_string(i) +
                          " share a location");
    }
    rp.models.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      column.clear();
      for (const auto& scan : set.scans) column.push_back(scan.value_or_sentinel(k));
      rp.models.push_back(fit_model(options.family, column, options.fit));
    }
    rps.push_back(std::move(rp));
  }
  return RadioMap(std::move(rps), options.family, options.grid_size, options.ap_count);
}

RadioMap build_csi_radio_map(std::span<const CsiTrainingPoint> training, double grid_size,
                             std::size_t ap_count) {
  std::vector<ScanSet> sets;
  std::vector<std::int64_t> ids;
  sets.reserve(training.size());
  for (const auto& point : training) {
    sets.push_back(csi_to_scanset(point.matrix, point.location));
    ids.push_back(point.rp_id);
  }
  TrainingOptions options;
  options.family = ModelFamily::csi_power_gaussian;
  options.grid_size = grid_size;
  options.ap_count = ap_count;
  return build_radio_map(sets, options, ids);
}

}  // namespace ssploc
