#pragma once

// File formats.
//
// Radio map (JSON):
//   {"schema": "ssploc.radio_map", "version": 1, "family": "...",
//    "feature_count": N, "ap_count": P, "grid_size": meters,
//    "rps": [{"rp_id": i, "x": m, "y": m, "models": [<model>, ...]}, ...]}
//   <model> is {"family": "..."} plus
//     single_gaussian / csi_power_gaussian: "mean", "std"
//     double_gaussian: "weights", "means", "stds" (2 each), "fallback"
//     lognormal: "shift", "log_mean", "log_std"
//     histogram: "bin_width", "first_bin", "probabilities"
//     kernel: "bandwidth", "samples"
//
// Training scans (JSON):
//   {"schema": "ssploc.scans", "version": 1, "fingerprint": "rssi" | "csi_power",
//    "feature_count": N, "ap_count": P, "grid_size": meters,
//    "scan_sets": [{"rp_id": i, "x": m, "y": m, "scans": [[r_1, ..., r_N], ...]}]}
//   A missing reading is null.
//
// Trajectory scans (JSON):
//   {"schema": "ssploc.trajectory", "version": 1, "fingerprint": ..., "feature_count": N,
//    "delta_t": s, "v_max": m/s, "steps": [{"step": t, "scans": [[...], ...]}]}
//
// Ground truth sidecar (CSV): "step,x,y" header then one row per step.
// CSI matrix (CSV): H lines of W comma-separated amplitudes, no header.
// CSI index (CSV): "rp_id,x,y,file" header, file relative to the index.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "fingerprint.hpp"
#include "radio_map.hpp"

namespace ssploc {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

json model_to_json(const LikelihoodModel& model);
LikelihoodModel model_from_json(const json& j, const std::string& path = "model");

json radio_map_to_json(const RadioMap& map);
RadioMap radio_map_from_json(const json& j);

struct TrainingData {
  std::string fingerprint = "rssi";
  std::size_t ap_count = 0;
  double grid_size = 0.0;
  std::vector<std::int64_t> rp_ids;
  std::vector<ScanSet> sets;  // each with a location
};

json training_to_json(const TrainingData& data);
TrainingData training_from_json(const json& j);

struct TrajectoryData {
  std::string fingerprint = "rssi";
  double delta_t = 1.0;
  double v_max = 4.0;
  std::vector<ScanSet> scans;
};

json trajectory_to_json(const TrajectoryData& data);
TrajectoryData trajectory_from_json(const json& j);

// Step records: step index, x, y, flag names, top-K ids; the full posterior
// and log-likelihoods are included when verbose.
json estimates_to_json(std::span<const StepEstimate> estimates, bool verbose = false);

std::vector<std::string> flag_names(unsigned flags);

// Whole-file helpers. Reads throw data errors, writes create parent dirs.
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

void save_radio_map(const RadioMap& map, const std::filesystem::path& path);
RadioMap load_radio_map(const std::filesystem::path& path);

std::string truth_to_csv(std::span<const Location> truth);
std::vector<Location> truth_from_csv(const std::string& text);
std::vector<Location> load_truth_csv(const std::filesystem::path& path);

std::string csi_to_csv(const CsiMatrix& m);
CsiMatrix csi_from_csv(const std::string& text);
CsiMatrix load_csi_csv(const std::filesystem::path& path);

struct CsiIndexEntry {
  std::int64_t rp_id = 0;
  Location location;
  std::string file;
};

std::string csi_index_to_csv(std::span<const CsiIndexEntry> entries);
std::vector<CsiIndexEntry> csi_index_from_csv(const std::string& text);
// Loads every matrix named by the index file.
std::vector<CsiTrainingPoint> load_csi_training(const std::filesystem::path& index_path);

}  // namespace ssploc
