#pragma once

// Synthetic test site: log-distance path loss radio maps, bounded-speed
// trajectories, noisy RSSI / CSI scans, and history-error injection.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "fingerprint.hpp"

namespace ssploc {

using Rng = std::mt19937_64;

// Independent generator for one (seed, stream) pair.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

struct PathLoss {
  double p0_dbm = -30.0;  // mean RSSI at d0
  double d0 = 1.0;        // meters
  double exponent = 3.0;
  double shadowing_std = 2.0;  // dB, per reading
};

// One physical AP; every band offset yields one fingerprint feature (one
// radio / MAC address).
struct AccessPoint {
  Location position;
  std::vector<double> band_offsets_db{0.0};
};

struct EnvironmentSpec {
  double width = 21.0;
  double height = 16.0;
  std::vector<AccessPoint> access_points;
  double rp_grid_spacing = 1.0;
  PathLoss pathloss;
  std::uint64_t seed = 42;

  // 21 x 16 m, six single-band APs on a 3 x 2 lattice, 1 m grid.
  static EnvironmentSpec canonical();

  std::size_t feature_count() const noexcept;
  // Throws a config error naming the offending field.
  void validate() const;
};

// Deterministic mean RSSI of every feature at any location:
//   p0 + band_offset - 10 n log10(max(d, d0) / d0)
class RadioTruth {
 public:
  explicit RadioTruth(const EnvironmentSpec& env);

  std::size_t feature_count() const noexcept { return features_.size(); }
  double mean_rssi(std::size_t feature, const Location& at) const;
  std::vector<double> mean_rssi(const Location& at) const;
  const PathLoss& pathloss() const noexcept { return pathloss_; }
  // AP index behind a feature.
  std::size_t ap_of(std::size_t feature) const { return features_.at(feature).ap; }

 private:
  struct Feature {
    std::size_t ap;
    Location position;
    double offset_db;
  };
  std::vector<Feature> features_;
  PathLoss pathloss_;
};

RadioTruth synth_radio_truth(const EnvironmentSpec& env);

// Truth mean plus N(0, shadowing_std^2) per feature, clamped at
// kMissingRssiDbm.
FeatureVector sample_scan(const RadioTruth& truth, const Location& at, const EnvironmentSpec& env,
                          Rng& rng);

// Grid RPs at multiples of the spacing covering [0, width] x [0, height],
// row-major in y then x.
std::vector<Location> grid_locations(const EnvironmentSpec& env);

// One ScanSet of s1 scans per grid RP.
std::vector<ScanSet> build_training_set(const EnvironmentSpec& env, const RadioTruth& truth,
                                        std::size_t s1, Rng& rng);

enum class WaypointPolicy {
  corridor_walk,  // axis-aligned headings with random 90 degree turns
  free_roam,      // heading drifts randomly
};

std::string_view to_string(WaypointPolicy policy);
std::optional<WaypointPolicy> parse_waypoint_policy(std::string_view name);

struct TrajectorySpec {
  double speed_min = 0.6;  // m/s
  double speed_max = 4.0;  // m/s
  double delta_t = 1.0;    // s
  std::size_t n_steps = 175;
  std::size_t scans_per_step = 2;  // S2
  WaypointPolicy policy = WaypointPolicy::corridor_walk;
  std::uint64_t seed = 42;

  void validate() const;
};

struct Trajectory {
  std::vector<Location> truth;
  std::vector<ScanSet> scans;  // no location attached
};

// Positions move straight within each step by speed * delta_t with speed
// drawn uniformly from [speed_min, speed_max], never leaving the map.
Trajectory generate_trajectory(const TrajectorySpec& spec, const EnvironmentSpec& env,
                               const RadioTruth& truth);

// Adds independent N(0, e^2 / 2) offsets to x and y, so that
// sigma_x^2 + sigma_y^2 = e^2. e = 0 returns the input unchanged.
Location inject_history_error(const Location& l, double e, Rng& rng);

struct CsiSpec {
  std::size_t measurements = 100;  // H per RP
  std::size_t subcarriers = 90;    // W
  std::size_t ap_index = 0;
  double k_factor = 4.0;  // Rician K of the per-subcarrier jitter
};

// H x W amplitudes. Each measurement draws a shadowed RSSI for the AP's
// first band, converts it to a base amplitude (1.0 at kMissingRssiDbm), and
// scales it per subcarrier by a unit-power Rician factor.
CsiMatrix sample_csi(const RadioTruth& truth, const Location& at, const EnvironmentSpec& env,
                     const CsiSpec& csi, std::size_t rows, Rng& rng);

}  // namespace ssploc
