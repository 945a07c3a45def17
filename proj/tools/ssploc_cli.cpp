// ssploc command-line runner. Builds a JSON request from flags and hands it
// to the C API; the JSON summary goes to stdout.

#include <ssploc/ssploc.h>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

using nlohmann::json;

namespace {

// Exit codes: 0 ok, 2 config/usage, 3 data, 4 internal.
int exit_code(ssploc_status status) {
  switch (status) {
    case SSPLOC_OK: return 0;
    case SSPLOC_ERR_ARGUMENT:
    case SSPLOC_ERR_CONFIG: return 2;
    case SSPLOC_ERR_DATA: return 3;
    default: return 4;
  }
}

using Runner = ssploc_status (*)(const char*, char**);

int run(Runner runner, const json& request) {
  char* response = nullptr;
  const ssploc_status status = runner(request.dump().c_str(), &response);
  if (status != SSPLOC_OK) {
    std::cerr << "ssploc: error: " << ssploc_last_error() << "\n";
    return exit_code(status);
  }
  std::cout << json::parse(response).dump(2) << "\n";
  ssploc_string_free(response);
  return 0;
}

// Options shared by the commands that replay a trajectory.
struct TrackFlags {
  std::string config_path;
  std::string map;
  std::string dataset;
  std::optional<std::string> window;
  std::optional<double> sigma;
  std::optional<double> v_max;
  std::optional<std::size_t> top_k;
  std::optional<std::string> matching;
  bool weighted_top_k = false;
  std::optional<double> history_error;
  std::optional<std::string> history_source;
  std::optional<std::string> family;
  std::vector<std::size_t> align;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* cmd, bool all) {
    cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--map", map, "trained radio map")->required();
    cmd->add_option("--dataset", dataset, "dataset directory (trajectory.json, truth.csv)")->required();
    cmd->add_option("--v-max", v_max, "speed bound in m/s (default: from the trajectory file)");
    cmd->add_option("--top-k", top_k, "RPs averaged into each estimate");
    cmd->add_option("--matching", matching, "per_scan_product or mean_scan");
    cmd->add_flag("--weighted-top-k", weighted_top_k, "weight the top-K mean by posterior");
    cmd->add_option("--align", align, "steps at which memory is cleared, e.g. 0,50,100")->delimiter(',');
    if (!all) return;
    cmd->add_option("--window", window, "uniform, circular, gaussian, hann or tukey");
    cmd->add_option("--sigma", sigma, "window width as a multiple of d_max");
    cmd->add_option("--history-error", history_error, "history error E as a multiple of d_max");
    cmd->add_option("--history-source", history_source, "estimate or ground_truth");
    cmd->add_option("--seed", seed, "seed for history-error draws");
  }

  json request() const {
    json track = json::object();
    if (window) track["window"] = *window;
    if (sigma) track["sigma"] = *sigma;
    if (v_max) track["v_max"] = *v_max;
    if (top_k) track["top_k"] = *top_k;
    if (matching) track["matching"] = *matching;
    if (weighted_top_k) track["weighted_top_k"] = true;
    if (history_error) track["history_error"] = *history_error;
    if (history_source) track["history_source"] = *history_source;
    if (!align.empty()) track["alignment_steps"] = align;
    json config = json::object();
    if (!track.empty()) config["track"] = track;
    if (seed) config["seed"] = *seed;
    json r{{"map", map}, {"dataset", dataset}, {"config", config}};
    if (!config_path.empty()) r["config_path"] = config_path;
    return r;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fingerprint localization with a short-term-memory prior"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ssploc_version());

  // gen
  auto* gen = app.add_subcommand("gen", "simulate a site and write a dataset");
  std::string gen_config, gen_out, gen_fingerprint;
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::size_t> gen_scans, gen_steps;
  gen->add_option("--config", gen_config, "JSON config file")->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--fingerprint", gen_fingerprint, "rssi or csi");
  gen->add_option("--scans-per-rp", gen_scans, "training scans per RP");
  gen->add_option("--steps", gen_steps, "trajectory length");
  gen->add_option("--out", gen_out, "output directory (default: $SSPLOC_OUTPUT_DIR)");

  // train
  auto* train = app.add_subcommand("train", "fit a radio map from a dataset");
  std::string train_dataset, train_out;
  std::optional<std::string> train_family;
  std::optional<double> bin_width, bandwidth;
  train->add_option("--dataset", train_dataset, "dataset directory")->required();
  train->add_option("--family", train_family,
                    "single_gaussian (horus), double_gaussian (dgd), lognormal, histogram, kernel, "
                    "csi_power_gaussian (fila)");
  train->add_option("--bin-width", bin_width, "histogram bin width in dB");
  train->add_option("--bandwidth", bandwidth, "kernel bandwidth in dB (default: Silverman)");
  train->add_option("--out", train_out, "map file (default: $SSPLOC_OUTPUT_DIR/map.json)");

  // track
  auto* track = app.add_subcommand("track", "localize a trajectory");
  TrackFlags track_flags;
  std::string track_out;
  bool verbose = false;
  track_flags.add_to(track, true);
  track->add_option("--out", track_out, "output directory (default: $SSPLOC_OUTPUT_DIR)");
  track->add_flag("--verbose", verbose, "include posteriors and log-likelihoods");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "mean error over windows and widths");
  TrackFlags sweep_flags;
  std::vector<std::string> families;
  std::vector<double> sigmas;
  std::string sweep_out;
  sweep_flags.add_to(sweep, false);
  sweep->add_option("--families", families, "windows, default circular,gaussian,hann,tukey")->delimiter(',');
  sweep->add_option("--sigmas", sigmas, "widths as multiples of d_max, default 0.5,1,1.5,2")->delimiter(',');
  sweep->add_option("--out", sweep_out, "CSV file (default: $SSPLOC_OUTPUT_DIR/sweep.csv)");

  // bench
  auto* bench = app.add_subcommand("bench", "per-step runtime of each window");
  TrackFlags bench_flags;
  std::optional<double> bench_sigma;
  std::size_t repeats = 5;
  std::string bench_out;
  bench_flags.add_to(bench, false);
  bench->add_option("--sigma", bench_sigma, "window width as a multiple of d_max");
  bench->add_option("--repeats", repeats, "runs per window")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "CSV file (default: $SSPLOC_OUTPUT_DIR/bench.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (gen->parsed()) {
    json config = json::object();
    if (gen_seed) config["seed"] = *gen_seed;
    if (!gen_fingerprint.empty()) config["fingerprint"] = gen_fingerprint;
    if (gen_scans) config["training"]["scans_per_rp"] = *gen_scans;
    if (gen_steps) config["trajectory"]["n_steps"] = *gen_steps;
    json request{{"config", config}};
    if (!gen_config.empty()) request["config_path"] = gen_config;
    if (!gen_out.empty()) request["out_dir"] = gen_out;
    return run(ssploc_run_gen, request);
  }
  if (train->parsed()) {
    json request{{"dataset", train_dataset}};
    if (train_family) request["family"] = *train_family;
    if (bin_width) request["bin_width"] = *bin_width;
    if (bandwidth) request["bandwidth"] = *bandwidth;
    if (!train_out.empty()) request["out"] = train_out;
    return run(ssploc_run_train, request);
  }
  if (track->parsed()) {
    json request = track_flags.request();
    request["verbose"] = verbose;
    if (!track_out.empty()) request["out_dir"] = track_out;
    return run(ssploc_run_track, request);
  }
  if (sweep->parsed()) {
    json request = sweep_flags.request();
    if (!families.empty()) request["families"] = families;
    if (!sigmas.empty()) request["sigmas"] = sigmas;
    if (!sweep_out.empty()) request["out"] = sweep_out;
    return run(ssploc_run_sweep, request);
  }
  if (bench->parsed()) {
    json request = bench_flags.request();
    request["repeats"] = repeats;
    if (bench_sigma) request["config"]["track"]["sigma"] = *bench_sigma;
    if (!bench_out.empty()) request["out"] = bench_out;
    return run(ssploc_run_bench, request);
  }
  return 2;
}
