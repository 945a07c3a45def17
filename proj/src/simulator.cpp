#include "simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace ssploc {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

EnvironmentSpec EnvironmentSpec::canonical() {
  EnvironmentSpec env;
  const std::array<double, 3> xs{env.width / 6.0, env.width / 2.0, 5.0 * env.width / 6.0};
  const std::array<double, 2> ys{env.height / 4.0, 3.0 * env.height / 4.0};
  for (double y : ys) {
    for (double x : xs) {
      env.access_points.push_back(AccessPoint{{x, y}, {0.0}});
    }
  }
  return env;
}

std::size_t EnvironmentSpec::feature_count() const noexcept {
  std::size_t n = 0;
  for (const auto& ap : access_points) n += ap.band_offsets_db.size();
  return n;
}

void EnvironmentSpec::validate() const {
  auto positive = [](double v, const char* field) {
    if (!std::isfinite(v) || v <= 0.0) throw_config(std::string(field) + ": must be > 0");
  };
  positive(width, "environment.width");
  positive(height, "environment.height");
  positive(rp_grid_spacing, "environment.rp_grid_spacing");
  positive(pathloss.d0, "environment.pathloss.d0");
  if (!std::isfinite(pathloss.p0_dbm)) throw_config("environment.pathloss.p0_dbm: must be finite");
  if (!std::isfinite(pathloss.exponent) || pathloss.exponent < 0.0) {
    throw_config("environment.pathloss.exponent: must be >= 0");
  }
  if (!std::isfinite(pathloss.shadowing_std) || pathloss.shadowing_std < 0.0) {
    throw_config("environment.pathloss.shadowing_std: must be >= 0");
  }
  if (access_points.empty()) throw_config("environment.access_points: at least one AP required");
  for (std::size_t a = 0; a < access_points.size(); ++a) {
    const auto& ap = access_points[a];
    const std::string path = "environment.access_points[" + std::to_string(a) + "]";
    if (!std::isfinite(ap.position.x) || !std::isfinite(ap.position.y)) {
      throw_config(path + ": position must be finite");
    }
    if (ap.band_offsets_db.empty()) throw_config(path + ".band_offsets_db: at least one band required");
    for (double o : ap.band_offsets_db) {
      if (!std::isfinite(o)) throw_config(path + ".band_offsets_db: must be finite");
    }
  }
}

RadioTruth::RadioTruth(const EnvironmentSpec& env) : pathloss_(env.pathloss) {
  env.validate();
  for (std::size_t a = 0; a < env.access_points.size(); ++a) {
    for (double offset : env.access_points[a].band_offsets_db) {
      features_.push_back({a, env.access_points[a].position, offset});
    }
  }
}

double RadioTruth::mean_rssi(std::size_t feature, const Location& at) const {
  const Feature& f = features_.at(feature);
  const double d = std::max(euclidean_distance(at, f.position), pathloss_.d0);
  return pathloss_.p0_dbm + f.offset_db - 10.0 * pathloss_.exponent * std::log10(d / pathloss_.d0);
}

std::vector<double> RadioTruth::mean_rssi(const Location& at) const {
  std::vector<double> out(features_.size());
  for (std::size_t k = 0; k < features_.size(); ++k) out[k] = mean_rssi(k, at);
  return out;
}

RadioTruth synth_radio_truth(const EnvironmentSpec& env) { return RadioTruth(env); }

FeatureVector sample_scan(const RadioTruth& truth, const Location& at, const EnvironmentSpec& env,
                          Rng& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> values = truth.mean_rssi(at);
  for (double& v : values) {
    v += env.pathloss.shadowing_std * noise(rng);
    v = std::max(v, kMissingRssiDbm);
  }
  return FeatureVector(std::move(values));
}

std::vector<Location> grid_locations(const EnvironmentSpec& env) {
  env.validate();
  const double s = env.rp_grid_spacing;
  const auto nx = static_cast<std::size_t>(std::floor(env.width / s + 1e-9)) + 1;
  const auto ny = static_cast<std::size_t>(std::floor(env.height / s + 1e-9)) + 1;
  std::vector<Location> out;
  out.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      out.push_back({static_cast<double>(i) * s, static_cast<double>(j) * s});
    }
  }
  return out;
}

std::vector<ScanSet> build_training_set(const EnvironmentSpec& env, const RadioTruth& truth,
                                        std::size_t s1, Rng& rng) {
  if (s1 < 1) throw_config("training.scans_per_rp: must be >= 1");
  std::vector<ScanSet> out;
  for (const Location& rp : grid_locations(env)) {
    ScanSet set;
    set.location = rp;
    set.scans.reserve(s1);
    for (std::size_t s = 0; s < s1; ++s) set.scans.push_back(sample_scan(truth, rp, env, rng));
    out.push_back(std::move(set));
  }
  return out;
}

std::string_view to_string(WaypointPolicy policy) {
  switch (policy) {
    case WaypointPolicy::corridor_walk: return "corridor_walk";
    case WaypointPolicy::free_roam: return "free_roam";
  }
  return "unknown";
}

std::optional<WaypointPolicy> parse_waypoint_policy(std::string_view name) {
  if (name == "corridor_walk") return WaypointPolicy::corridor_walk;
  if (name == "free_roam") return WaypointPolicy::free_roam;
  return std::nullopt;
}

void TrajectorySpec::validate() const {
  if (!std::isfinite(speed_min) || speed_min <= 0.0) throw_config("trajectory.speed_min: must be > 0");
  if (!std::isfinite(speed_max) || speed_max < speed_min) {
    throw_config("trajectory.speed_max: must be >= speed_min");
  }
  if (!std::isfinite(delta_t) || delta_t <= 0.0) throw_config("trajectory.delta_t: must be > 0");
  if (n_steps < 1) throw_config("trajectory.n_steps: must be >= 1");
  if (scans_per_step < 1) throw_config("trajectory.scans_per_step: must be >= 1");
}

namespace {

// Unit headings for the corridor walk: +x, +y, -x, -y.
constexpr std::array<std::array<double, 2>, 4> kAxisHeadings{{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}};
constexpr double kTurnProbability = 0.15;
constexpr double kHeadingDrift = 0.5;  // rad, free roam
constexpr int kHeadingAttempts = 256;

bool inside(const EnvironmentSpec& env, const Location& p) {
  return p.x >= 0.0 && p.x <= env.width && p.y >= 0.0 && p.y <= env.height;
}

}  // namespace

Trajectory generate_trajectory(const TrajectorySpec& spec, const EnvironmentSpec& env,
                               const RadioTruth& truth) {
  spec.validate();
  env.validate();
  Rng motion = make_rng(spec.seed, 1);
  Rng radio = make_rng(spec.seed, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> speed(spec.speed_min, spec.speed_max);
  std::normal_distribution<double> drift(0.0, kHeadingDrift);

  Trajectory out;
  out.truth.reserve(spec.n_steps);
  Location pos{unit(motion) * env.width, unit(motion) * env.height};
  std::size_t axis = static_cast<std::size_t>(unit(motion) * 4.0) % 4;
  double heading = unit(motion) * 2.0 * std::numbers::pi;

  out.truth.push_back(pos);
  while (out.truth.size() < spec.n_steps) {
    const double length = speed(motion) * spec.delta_t;
    Location next;
    bool moved = false;
    if (spec.policy == WaypointPolicy::corridor_walk) {
      if (unit(motion) < kTurnProbability) axis = (axis + (unit(motion) < 0.5 ? 1 : 3)) % 4;
      // Current heading first, then the two turns in random order, then back.
      const std::size_t side = unit(motion) < 0.5 ? 1 : 3;
      const std::array<std::size_t, 4> order{axis, (axis + side) % 4, (axis + 4 - side) % 4, (axis + 2) % 4};
      for (std::size_t a : order) {
        next = {pos.x + length * kAxisHeadings[a][0], pos.y + length * kAxisHeadings[a][1]};
        if (inside(env, next)) {
          axis = a;
          moved = true;
          break;
        }
      }
    } else {
      heading += drift(motion);
      for (int attempt = 0; attempt < kHeadingAttempts && !moved; ++attempt) {
        if (attempt > 0) heading = unit(motion) * 2.0 * std::numbers::pi;
        next = {pos.x + length * std::cos(heading), pos.y + length * std::sin(heading)};
        moved = inside(env, next);
      }
    }
    if (!moved) {
      throw_config("trajectory: map is too small for a step of " + std::to_string(length) + " m");
    }
    pos = next;
    out.truth.push_back(pos);
  }

  out.scans.reserve(out.truth.size());
  for (const Location& p : out.truth) {
    ScanSet set;
    for (std::size_t s = 0; s < spec.scans_per_step; ++s) set.scans.push_back(sample_scan(truth, p, env, radio));
    out.scans.push_back(std::move(set));
  }
  return out;
}

Location inject_history_error(const Location& l, double e, Rng& rng) {
  if (!(e >= 0.0) || !std::isfinite(e)) throw_argument("history error must be finite and >= 0");
  if (e == 0.0) return l;
  std::normal_distribution<double> axis(0.0, e / std::numbers::sqrt2);
  const double dx = axis(rng);
  const double dy = axis(rng);
  return {l.x + dx, l.y + dy};
}

CsiMatrix sample_csi(const RadioTruth& truth, const Location& at, const EnvironmentSpec& env,
                     const CsiSpec& csi, std::size_t rows, Rng& rng) {
  if (rows < 1 || csi.subcarriers < 1) throw_config("csi: H and W must be >= 1");
  if (!(csi.k_factor >= 0.0)) throw_config("csi.k_factor: must be >= 0");
  std::size_t feature = truth.feature_count();
  for (std::size_t k = 0; k < truth.feature_count(); ++k) {
    if (truth.ap_of(k) == csi.ap_index) {
      feature = k;
      break;
    }
  }
  if (feature == truth.feature_count()) throw_config("csi.ap_index: no such access point");

  std::normal_distribution<double> noise(0.0, 1.0);
  const double los = std::sqrt(csi.k_factor / (csi.k_factor + 1.0));
  const double scatter = std::sqrt(0.5 / (csi.k_factor + 1.0));
  const double mean = truth.mean_rssi(feature, at);
  std::vector<double> amps;
  amps.reserve(rows * csi.subcarriers);
  for (std::size_t h = 0; h < rows; ++h) {
    const double rssi = std::max(mean + env.pathloss.shadowing_std * noise(rng), kMissingRssiDbm);
    const double base = std::pow(10.0, (rssi - kMissingRssiDbm) / 20.0);
    for (std::size_t w = 0; w < csi.subcarriers; ++w) {
      const double re = los + scatter * noise(rng);
      const double im = scatter * noise(rng);
      amps.push_back(base * std::hypot(re, im));
    }
  }
  return CsiMatrix(rows, csi.subcarriers, std::move(amps));
}

}  // namespace ssploc
