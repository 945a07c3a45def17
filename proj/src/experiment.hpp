#pragma once

// Experiment configuration and the command runners behind the CLI.
//
// Window spread and history error are configured as multiples of d_max, so
// "sigma": 0.5 means d_max / 2.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "engine.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "radio_map.hpp"
#include "simulator.hpp"

namespace ssploc {

inline constexpr int kConfigSchemaVersion = 1;

// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "SSPLOC_OUTPUT_DIR";

enum class HistorySource {
  estimate,      // previous step's estimate (normal tracking)
  ground_truth,  // previous true position, for robustness studies
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string fingerprint = "rssi";  // "rssi" or "csi"
  EnvironmentSpec environment = EnvironmentSpec::canonical();
  std::size_t scans_per_rp = 100;  // S1
  TrajectorySpec trajectory;       // its seed is derived from `seed`
  CsiSpec csi;

  ModelFamily family = ModelFamily::single_gaussian;
  FitOptions fit;

  WindowFamily window = WindowFamily::gaussian;
  double sigma_dmax = 1.0;
  std::optional<double> v_max;  // unset: taken from the trajectory file
  std::size_t top_k = 1;
  MatchingMode matching = MatchingMode::per_scan_product;
  bool weighted_top_k = false;
  std::vector<std::size_t> alignment_steps;
  double history_error_dmax = 0.0;
  HistorySource history_source = HistorySource::estimate;

  // Throws a config error naming the offending field.
  void validate() const;
  TrackConfig track_config(double delta_t) const;
};

json config_to_json(const ExperimentConfig& config);
// Fields absent from `j` keep their canonical values.
ExperimentConfig config_from_json(const json& j);

struct Dataset {
  TrainingData training;                        // rssi: raw scans, csi: per-measurement power
  std::vector<CsiTrainingPoint> csi_training;  // csi only
  TrajectoryData trajectory;
  std::vector<Location> truth;
};

Dataset generate_dataset(const ExperimentConfig& config);

// Writes config.json, trajectory.json, truth.csv and either training.json
// (rssi) or csi/index.csv plus one CSV per RP (csi).
void write_dataset(const Dataset& dataset, const ExperimentConfig& config,
                   const std::filesystem::path& dir);

struct LoadedDataset {
  std::vector<std::int64_t> rp_ids;
  std::vector<ScanSet> training;  // empty for csi datasets
  std::vector<CsiTrainingPoint> csi_training;
  std::size_t ap_count = 0;
  double grid_size = 0.0;
  TrajectoryData trajectory;
  std::vector<Location> truth;  // empty when the sidecar is absent
};

LoadedDataset load_dataset(const std::filesystem::path& dir, bool need_training);

RadioMap train_radio_map(const Dataset& dataset, ModelFamily family, const FitOptions& fit = {});

// Runs one trajectory with the config's window, alignment and history
// settings.
std::vector<StepEstimate> run_track(const RadioMap& map, std::span<const ScanSet> scans,
                                    std::span<const Location> truth, const ExperimentConfig& config,
                                    double delta_t, std::vector<double>* step_seconds = nullptr);

struct BenchRow {
  WindowFamily family = WindowFamily::uniform;
  double sigma_dmax = 0.0;
  double mean_step_seconds = 0.0;
  double std_step_seconds = 0.0;  // across repeats
  double ratio_to_memoryless = 1.0;
  std::size_t repeats = 0;
};

// Mean per-step wall time for the memoryless baseline and each window.
std::vector<BenchRow> runtime_bench(const RadioMap& map, std::span<const ScanSet> scans,
                                    const ExperimentConfig& config, double delta_t,
                                    std::size_t repeats);
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

// Command runners: JSON request in, JSON summary out. Requests name files
// and carry config overrides; see the README for the field list.
json command_gen(const json& request);
json command_train(const json& request);
json command_track(const json& request);
json command_sweep(const json& request);
json command_bench(const json& request);

}  // namespace ssploc
