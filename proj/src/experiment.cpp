#include "experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "error.hpp"

namespace ssploc {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kTrainingStream = 100;
constexpr std::uint64_t kCsiStream = 101;
constexpr std::uint64_t kHistoryStream = 200;

// Typed reads over a config object, reporting the dotted field path and
// rejecting keys the schema does not know.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw_config(path_ + ": expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.contains(key)) throw_config(where(key) + ": unknown field");
    }
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const char* key) const { return j_.at(key); }

  void read(const char* key, double& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw_config(where(key) + ": expected a number");
    out = v.get<double>();
  }
  void read(const char* key, std::size_t& out) const {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw_config(where(key) + ": expected a non-negative integer");
    }
    out = v.get<std::size_t>();
  }
  void read(const char* key, bool& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_boolean()) throw_config(where(key) + ": expected true or false");
    out = j_.at(key).get<bool>();
  }
  void read(const char* key, std::string& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_string()) throw_config(where(key) + ": expected a string");
    out = j_.at(key).get<std::string>();
  }
  template <typename Enum, typename Parser>
  void read_enum(const char* key, Enum& out, Parser parse) const {
    std::string name;
    read(key, name);
    if (name.empty()) return;
    auto parsed = parse(name);
    if (!parsed) throw_config(where(key) + ": unknown value \"" + name + "\"");
    out = *parsed;
  }

 private:
  const json& j_;
  std::string path_;
};

std::optional<HistorySource> parse_history_source(std::string_view name) {
  if (name == "estimate") return HistorySource::estimate;
  if (name == "ground_truth" || name == "truth") return HistorySource::ground_truth;
  return std::nullopt;
}

std::string_view to_string(HistorySource source) {
  return source == HistorySource::estimate ? "estimate" : "ground_truth";
}

json resolve_config_json(const json& request) {
  json merged = config_to_json(ExperimentConfig{});
  if (request.contains("config_path") && !request.at("config_path").is_null()) {
    merged.merge_patch(read_json_file(request.at("config_path").get<std::string>()));
  }
  if (request.contains("config") && !request.at("config").is_null()) {
    if (!request.at("config").is_object()) throw_config("config: expected an object");
    merged.merge_patch(request.at("config"));
  }
  return merged;
}

ExperimentConfig resolve_config(const json& request) {
  if (!request.is_object()) throw_config("request: expected an object");
  return config_from_json(resolve_config_json(request));
}

std::string required_string(const json& request, const char* key) {
  if (!request.contains(key) || !request.at(key).is_string() || request.at(key).get<std::string>().empty()) {
    throw_config(std::string(key) + ": required");
  }
  return request.at(key).get<std::string>();
}

fs::path output_dir(const json& request, const char* key) {
  if (request.contains(key) && request.at(key).is_string() && !request.at(key).get<std::string>().empty()) {
    return request.at(key).get<std::string>();
  }
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "ssploc-out";
}

json report_to_json(const ErrorReport& r) {
  return json{{"steps", r.errors.size()}, {"mean", r.mean},     {"std", r.std},
              {"max", r.max},             {"median", r.median}, {"flags", r.degraded_steps}};
}

std::string csv_string(const std::function<void(std::ostream&)>& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  environment.validate();
  trajectory.validate();
  if (fingerprint != "rssi" && fingerprint != "csi") throw_config("fingerprint: expected \"rssi\" or \"csi\"");
  if (scans_per_rp < 1) throw_config("training.scans_per_rp: must be >= 1");
  if (!(fit.bin_width > 0.0)) throw_config("likelihood.bin_width: must be > 0");
  if (fit.bandwidth && !(*fit.bandwidth > 0.0)) throw_config("likelihood.bandwidth: must be > 0");
  if (window != WindowFamily::uniform && !(sigma_dmax > 0.0)) throw_config("track.sigma: must be > 0");
  if (v_max && !(*v_max > 0.0)) throw_config("track.v_max: must be > 0");
  if (top_k < 1) throw_config("track.top_k: must be >= 1");
  if (!(history_error_dmax >= 0.0)) throw_config("track.history_error: must be >= 0");
  if (fingerprint == "csi") {
    if (csi.measurements < 1) throw_config("csi.measurements: must be >= 1");
    if (csi.subcarriers < 1) throw_config("csi.subcarriers: must be >= 1");
    if (csi.ap_index >= environment.access_points.size()) throw_config("csi.ap_index: no such access point");
    if (!(csi.k_factor >= 0.0)) throw_config("csi.k_factor: must be >= 0");
  }
}

TrackConfig ExperimentConfig::track_config(double delta_t) const {
  TrackConfig cfg;
  cfg.v_max = v_max.value_or(trajectory.speed_max);
  cfg.delta_t = delta_t;
  cfg.window = {window, sigma_dmax * cfg.d_max()};
  cfg.top_k = top_k;
  cfg.matching = matching;
  cfg.weighted_top_k = weighted_top_k;
  return cfg;
}

json config_to_json(const ExperimentConfig& c) {
  json aps = json::array();
  for (const auto& ap : c.environment.access_points) {
    aps.push_back({{"x", ap.position.x}, {"y", ap.position.y}, {"band_offsets_db", ap.band_offsets_db}});
  }
  const auto& pl = c.environment.pathloss;
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = c.seed;
  j["fingerprint"] = c.fingerprint;
  j["environment"] = {{"width", c.environment.width},
                      {"height", c.environment.height},
                      {"rp_grid_spacing", c.environment.rp_grid_spacing},
                      {"access_points", aps},
                      {"pathloss",
                       {{"p0_dbm", pl.p0_dbm}, {"d0", pl.d0}, {"exponent", pl.exponent}, {"shadowing_std", pl.shadowing_std}}}};
  j["training"] = {{"scans_per_rp", c.scans_per_rp}};
  j["trajectory"] = {{"speed_min", c.trajectory.speed_min},
                     {"speed_max", c.trajectory.speed_max},
                     {"delta_t", c.trajectory.delta_t},
                     {"n_steps", c.trajectory.n_steps},
                     {"scans_per_step", c.trajectory.scans_per_step},
                     {"policy", std::string(to_string(c.trajectory.policy))}};
  j["csi"] = {{"measurements", c.csi.measurements},
              {"subcarriers", c.csi.subcarriers},
              {"ap_index", c.csi.ap_index},
              {"k_factor", c.csi.k_factor}};
  j["likelihood"] = {{"family", std::string(to_string(c.family))},
                     {"bin_width", c.fit.bin_width},
                     {"bandwidth", c.fit.bandwidth ? json(*c.fit.bandwidth) : json(nullptr)}};
  j["track"] = {{"window", std::string(to_string(c.window))},
                {"sigma", c.sigma_dmax},
                {"v_max", c.v_max ? json(*c.v_max) : json(nullptr)},
                {"top_k", c.top_k},
                {"matching", std::string(to_string(c.matching))},
                {"weighted_top_k", c.weighted_top_k},
                {"alignment_steps", c.alignment_steps},
                {"history_error", c.history_error_dmax},
                {"history_source", std::string(to_string(c.history_source))}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  const Section root(j, "", {"schema_version", "seed", "fingerprint", "environment", "training", "trajectory",
                             "csi", "likelihood", "track"});
  if (root.has("schema_version")) {
    std::size_t version = 0;
    root.read("schema_version", version);
    if (version != kConfigSchemaVersion) throw_config("schema_version: unsupported version " + std::to_string(version));
  }
  root.read("seed", c.seed);
  root.read("fingerprint", c.fingerprint);

  if (root.has("environment")) {
    const Section env(root.raw("environment"), "environment",
                      {"width", "height", "rp_grid_spacing", "access_points", "pathloss"});
    env.read("width", c.environment.width);
    env.read("height", c.environment.height);
    env.read("rp_grid_spacing", c.environment.rp_grid_spacing);
    if (env.has("access_points")) {
      const json& aps = env.raw("access_points");
      if (!aps.is_array()) throw_config("environment.access_points: expected an array");
      c.environment.access_points.clear();
      for (std::size_t a = 0; a < aps.size(); ++a) {
        const std::string path = "environment.access_points[" + std::to_string(a) + "]";
        const Section ap(aps[a], path, {"x", "y", "band_offsets_db"});
        if (!ap.has("x") || !ap.has("y")) throw_config(path + ": x and y are required");
        AccessPoint point;
        ap.read("x", point.position.x);
        ap.read("y", point.position.y);
        if (ap.has("band_offsets_db")) {
          const json& offsets = ap.raw("band_offsets_db");
          if (!offsets.is_array()) throw_config(path + ".band_offsets_db: expected an array");
          point.band_offsets_db.clear();
          for (const auto& o : offsets) {
            if (!o.is_number()) throw_config(path + ".band_offsets_db: expected numbers");
            point.band_offsets_db.push_back(o.get<double>());
          }
        }
        c.environment.access_points.push_back(std::move(point));
      }
    }
    if (env.has("pathloss")) {
      const Section pl(env.raw("pathloss"), "environment.pathloss", {"p0_dbm", "d0", "exponent", "shadowing_std"});
      pl.read("p0_dbm", c.environment.pathloss.p0_dbm);
      pl.read("d0", c.environment.pathloss.d0);
      pl.read("exponent", c.environment.pathloss.exponent);
      pl.read("shadowing_std", c.environment.pathloss.shadowing_std);
    }
  }
  if (root.has("training")) {
    const Section tr(root.raw("training"), "training", {"scans_per_rp"});
    tr.read("scans_per_rp", c.scans_per_rp);
  }
  if (root.has("trajectory")) {
    const Section tr(root.raw("trajectory"), "trajectory",
                     {"speed_min", "speed_max", "delta_t", "n_steps", "scans_per_step", "policy"});
    tr.read("speed_min", c.trajectory.speed_min);
    tr.read("speed_max", c.trajectory.speed_max);
    tr.read("delta_t", c.trajectory.delta_t);
    tr.read("n_steps", c.trajectory.n_steps);
    tr.read("scans_per_step", c.trajectory.scans_per_step);
    tr.read_enum("policy", c.trajectory.policy, parse_waypoint_policy);
  }
  if (root.has("csi")) {
    const Section csi(root.raw("csi"), "csi", {"measurements", "subcarriers", "ap_index", "k_factor"});
    csi.read("measurements", c.csi.measurements);
    csi.read("subcarriers", c.csi.subcarriers);
    csi.read("ap_index", c.csi.ap_index);
    csi.read("k_factor", c.csi.k_factor);
  }
  if (root.has("likelihood")) {
    const Section lk(root.raw("likelihood"), "likelihood", {"family", "bin_width", "bandwidth"});
    lk.read_enum("family", c.family, parse_model_family);
    lk.read("bin_width", c.fit.bin_width);
    if (lk.has("bandwidth")) {
      double h = 0.0;
      lk.read("bandwidth", h);
      c.fit.bandwidth = h;
    }
  }
  if (root.has("track")) {
    const Section tr(root.raw("track"), "track",
                     {"window", "sigma", "v_max", "top_k", "matching", "weighted_top_k", "alignment_steps",
                      "history_error", "history_source"});
    tr.read_enum("window", c.window, parse_window_family);
    tr.read("sigma", c.sigma_dmax);
    if (tr.has("v_max")) {
      double v = 0.0;
      tr.read("v_max", v);
      c.v_max = v;
    }
    tr.read("top_k", c.top_k);
    tr.read_enum("matching", c.matching, parse_matching_mode);
    tr.read("weighted_top_k", c.weighted_top_k);
    if (tr.has("alignment_steps")) {
      const json& steps = tr.raw("alignment_steps");
      if (!steps.is_array()) throw_config("track.alignment_steps: expected an array");
      for (const auto& s : steps) {
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
          throw_config("track.alignment_steps: expected non-negative integers");
        }
        c.alignment_steps.push_back(s.get<std::size_t>());
      }
    }
    tr.read("history_error", c.history_error_dmax);
    tr.read_enum("history_source", c.history_source, parse_history_source);
  }
  c.trajectory.seed = c.seed;
  c.validate();
  return c;
}

Dataset generate_dataset(const ExperimentConfig& config) {
  config.validate();
  TrajectorySpec tspec = config.trajectory;
  tspec.seed = config.seed;
  const RadioTruth truth = synth_radio_truth(config.environment);
  const Trajectory walk = generate_trajectory(tspec, config.environment, truth);

  Dataset d;
  d.truth = walk.truth;
  d.training.ap_count = config.environment.access_points.size();
  d.training.grid_size = config.environment.rp_grid_spacing;
  d.trajectory.delta_t = tspec.delta_t;
  d.trajectory.v_max = tspec.speed_max;

  if (config.fingerprint == "rssi") {
    Rng rng = make_rng(config.seed, kTrainingStream);
    d.training.fingerprint = "rssi";
    d.training.sets = build_training_set(config.environment, truth, config.scans_per_rp, rng);
    for (std::size_t i = 0; i < d.training.sets.size(); ++i) d.training.rp_ids.push_back(static_cast<std::int64_t>(i));
    d.trajectory.fingerprint = "rssi";
    d.trajectory.scans = walk.scans;
    return d;
  }

  Rng rng = make_rng(config.seed, kCsiStream);
  d.training.fingerprint = "csi_power";
  d.training.ap_count = 1;
  const auto rps = grid_locations(config.environment);
  for (std::size_t i = 0; i < rps.size(); ++i) {
    CsiTrainingPoint p{static_cast<std::int64_t>(i), rps[i],
                       sample_csi(truth, rps[i], config.environment, config.csi, config.csi.measurements, rng)};
    d.training.rp_ids.push_back(p.rp_id);
    d.training.sets.push_back(csi_to_scanset(p.matrix, p.location));
    d.csi_training.push_back(std::move(p));
  }
  d.trajectory.fingerprint = "csi_power";
  for (const Location& at : walk.truth) {
    d.trajectory.scans.push_back(
        csi_to_scanset(sample_csi(truth, at, config.environment, config.csi, config.trajectory.scans_per_step, rng)));
  }
  return d;
}

void write_dataset(const Dataset& dataset, const ExperimentConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  write_text_file(dir / "config.json", config_to_json(config).dump(2) + "\n");
  if (config.fingerprint == "rssi") {
    write_json_file(dir / "training.json", training_to_json(dataset.training));
  } else {
    std::vector<CsiIndexEntry> index;
    for (const auto& p : dataset.csi_training) {
      char name[32];
      std::snprintf(name, sizeof(name), "rp_%05lld.csv", static_cast<long long>(p.rp_id));
      write_text_file(dir / "csi" / name, csi_to_csv(p.matrix));
      index.push_back({p.rp_id, p.location, name});
    }
    write_text_file(dir / "csi" / "index.csv", csi_index_to_csv(index));
  }
  write_json_file(dir / "trajectory.json", trajectory_to_json(dataset.trajectory));
  write_text_file(dir / "truth.csv", truth_to_csv(dataset.truth));
}

LoadedDataset load_dataset(const fs::path& dir, bool need_training) {
  if (!fs::is_directory(dir)) throw_data("dataset directory " + dir.string() + " does not exist");
  LoadedDataset out;
  if (need_training) {
    if (fs::exists(dir / "training.json")) {
      TrainingData t = training_from_json(read_json_file(dir / "training.json"));
      out.rp_ids = std::move(t.rp_ids);
      out.training = std::move(t.sets);
      out.ap_count = t.ap_count;
      out.grid_size = t.grid_size;
    } else if (fs::exists(dir / "csi" / "index.csv")) {
      out.csi_training = load_csi_training(dir / "csi" / "index.csv");
      out.ap_count = 1;
    } else {
      throw_data(dir.string() + ": no training.json or csi/index.csv");
    }
  }
  if (fs::exists(dir / "trajectory.json")) {
    out.trajectory = trajectory_from_json(read_json_file(dir / "trajectory.json"));
  } else if (!need_training) {
    throw_data(dir.string() + ": no trajectory.json");
  }
  if (fs::exists(dir / "truth.csv")) {
    out.truth = load_truth_csv(dir / "truth.csv");
    if (!out.trajectory.scans.empty() && out.truth.size() != out.trajectory.scans.size()) {
      throw_data(dir.string() + ": truth.csv and trajectory.json have different step counts");
    }
  }
  return out;
}

RadioMap train_radio_map(const Dataset& dataset, ModelFamily family, const FitOptions& fit) {
  if (family == ModelFamily::csi_power_gaussian && !dataset.csi_training.empty()) {
    return build_csi_radio_map(dataset.csi_training, dataset.training.grid_size);
  }
  TrainingOptions options;
  options.family = family;
  options.fit = fit;
  options.grid_size = dataset.training.grid_size;
  options.ap_count = dataset.training.ap_count;
  return build_radio_map(dataset.training.sets, options, dataset.training.rp_ids);
}

std::vector<StepEstimate> run_track(const RadioMap& map, std::span<const ScanSet> scans,
                                    std::span<const Location> truth, const ExperimentConfig& config,
                                    double delta_t, std::vector<double>* step_seconds) {
  const TrackConfig cfg = config.track_config(delta_t);
  TrackOptions options;
  options.alignment_steps.insert(config.alignment_steps.begin(), config.alignment_steps.end());
  options.step_seconds = step_seconds;

  const double error = config.history_error_dmax * cfg.d_max();
  if (config.history_source == HistorySource::ground_truth) {
    if (truth.size() != scans.size()) throw_data("ground-truth history needs one truth location per step");
    auto rng = std::make_shared<Rng>(make_rng(config.seed, kHistoryStream));
    options.history = [rng, error, truth](std::size_t t, const Location&) {
      return inject_history_error(truth[t - 1], error, *rng);
    };
  } else if (error > 0.0) {
    auto rng = std::make_shared<Rng>(make_rng(config.seed, kHistoryStream));
    options.history = [rng, error](std::size_t, const Location& previous) {
      return inject_history_error(previous, error, *rng);
    };
  }
  return track(map, scans, cfg, options);
}

std::vector<BenchRow> runtime_bench(const RadioMap& map, std::span<const ScanSet> scans,
                                    const ExperimentConfig& config, double delta_t, std::size_t repeats) {
  if (repeats < 1) throw_config("repeats: must be >= 1");
  const std::vector<WindowFamily> families{WindowFamily::uniform, WindowFamily::circular, WindowFamily::gaussian,
                                           WindowFamily::hann, WindowFamily::tukey};
  std::vector<std::vector<double>> per_repeat(families.size());
  // Interleave families within each repeat so drift hits all of them alike.
  for (std::size_t r = 0; r < repeats; ++r) {
    for (std::size_t f = 0; f < families.size(); ++f) {
      ExperimentConfig c = config;
      c.window = families[f];
      c.alignment_steps.clear();
      c.history_error_dmax = 0.0;
      c.history_source = HistorySource::estimate;
      std::vector<double> seconds;
      run_track(map, scans, {}, c, delta_t, &seconds);
      per_repeat[f].push_back(std::accumulate(seconds.begin(), seconds.end(), 0.0) /
                              static_cast<double>(seconds.size()));
    }
  }
  std::vector<BenchRow> rows;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const auto& v = per_repeat[f];
    BenchRow row;
    row.family = families[f];
    row.sigma_dmax = families[f] == WindowFamily::uniform ? 0.0 : config.sigma_dmax;
    row.repeats = v.size();
    row.mean_step_seconds = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double s : v) ss += (s - row.mean_step_seconds) * (s - row.mean_step_seconds);
    row.std_step_seconds = std::sqrt(ss / static_cast<double>(v.size()));
    rows.push_back(row);
  }
  for (auto& row : rows) row.ratio_to_memoryless = row.mean_step_seconds / rows.front().mean_step_seconds;
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "window,sigma_dmax,mean_step_seconds,std_step_seconds,ratio_to_memoryless,repeats\n";
  for (const auto& r : rows) {
    out << to_string(r.family) << ',' << r.sigma_dmax << ',' << r.mean_step_seconds << ',' << r.std_step_seconds
        << ',' << r.ratio_to_memoryless << ',' << r.repeats << '\n';
  }
}

json command_gen(const json& request) {
  const ExperimentConfig config = resolve_config(request);
  const fs::path dir = output_dir(request, "out_dir");
  const Dataset d = generate_dataset(config);
  write_dataset(d, config, dir);
  return {{"out_dir", dir.string()},
          {"fingerprint", config.fingerprint},
          {"rp_count", d.training.sets.size()},
          {"feature_count", d.training.sets.front().feature_count()},
          {"trajectory_steps", d.trajectory.scans.size()},
          {"seed", config.seed}};
}

json command_train(const json& request) {
  if (!request.is_object()) throw_config("request: expected an object");
  const fs::path dataset_dir = required_string(request, "dataset");
  const LoadedDataset loaded = load_dataset(dataset_dir, true);
  const bool csi = !loaded.csi_training.empty();

  ModelFamily family = csi ? ModelFamily::csi_power_gaussian : ModelFamily::single_gaussian;
  if (request.contains("family") && !request.at("family").is_null()) {
    const std::string name = request.at("family").get<std::string>();
    const auto parsed = parse_model_family(name);
    if (!parsed) throw_config("family: unknown likelihood family \"" + name + "\"");
    family = *parsed;
  }
  FitOptions fit;
  if (request.contains("bin_width") && !request.at("bin_width").is_null()) fit.bin_width = request.at("bin_width").get<double>();
  if (request.contains("bandwidth") && !request.at("bandwidth").is_null()) fit.bandwidth = request.at("bandwidth").get<double>();
  if (!(fit.bin_width > 0.0)) throw_config("bin_width: must be > 0");
  if (fit.bandwidth && !(*fit.bandwidth > 0.0)) throw_config("bandwidth: must be > 0");

  std::vector<std::string> warnings;
  std::optional<RadioMap> map;
  if (csi) {
    if (family == ModelFamily::csi_power_gaussian) {
      map.emplace(build_csi_radio_map(loaded.csi_training, loaded.grid_size));
    } else {
      std::vector<ScanSet> sets;
      std::vector<std::int64_t> ids;
      for (const auto& p : loaded.csi_training) {
        sets.push_back(csi_to_scanset(p.matrix, p.location));
        ids.push_back(p.rp_id);
      }
      TrainingOptions options{family, fit, loaded.grid_size, 1};
      map.emplace(build_radio_map(sets, options, ids, &warnings));
    }
  } else {
    if (family == ModelFamily::csi_power_gaussian) throw_config("family: csi_power_gaussian needs a CSI dataset");
    TrainingOptions options{family, fit, loaded.grid_size, loaded.ap_count};
    map.emplace(build_radio_map(loaded.training, options, loaded.rp_ids, &warnings));
  }

  const fs::path out = request.contains("out") && request.at("out").is_string()
                           ? fs::path(request.at("out").get<std::string>())
                           : output_dir(request, "out_dir") / "map.json";
  save_radio_map(*map, out);
  return {{"map", out.string()},
          {"family", std::string(to_string(map->family()))},
          {"rp_count", map->rp_count()},
          {"feature_count", map->feature_count()},
          {"model_count", map->rp_count() * map->feature_count()},
          {"warnings", warnings}};
}

json command_track(const json& request) {
  const ExperimentConfig config = resolve_config(request);
  const RadioMap map = load_radio_map(required_string(request, "map"));
  const LoadedDataset data = load_dataset(required_string(request, "dataset"), false);
  const bool verbose = request.value("verbose", false);

  ExperimentConfig c = config;
  if (!c.v_max) c.v_max = data.trajectory.v_max;
  std::vector<double> seconds;
  const auto estimates = run_track(map, data.trajectory.scans, data.truth, c, data.trajectory.delta_t, &seconds);

  const fs::path dir = output_dir(request, "out_dir");
  write_json_file(dir / "estimates.json", estimates_to_json(estimates, verbose));
  json summary{{"estimates", (dir / "estimates.json").string()},
               {"steps", estimates.size()},
               {"window", std::string(to_string(c.window))},
               {"sigma_m", c.track_config(data.trajectory.delta_t).window.sigma},
               {"d_max", *c.v_max * data.trajectory.delta_t}};
  if (!data.truth.empty()) {
    const ErrorReport report = summarize_run(estimates, data.truth, seconds);
    const TrackConfig cfg = c.track_config(data.trajectory.delta_t);
    write_text_file(dir / "report.csv",
                    csv_string([&](std::ostream& o) { write_report_csv(o, report, cfg.window, cfg.d_max()); }));
    write_text_file(dir / "cdf.csv", csv_string([&](std::ostream& o) { write_cdf_csv(o, report); }));
    summary["report"] = report_to_json(report);
    summary["mean_step_seconds"] = report.mean_step_seconds();
  }
  return summary;
}

json command_sweep(const json& request) {
  const ExperimentConfig config = resolve_config(request);
  const RadioMap map = load_radio_map(required_string(request, "map"));
  const LoadedDataset data = load_dataset(required_string(request, "dataset"), false);
  if (data.truth.empty()) throw_data("sweep needs truth.csv in the dataset");

  std::vector<WindowFamily> families{WindowFamily::circular, WindowFamily::gaussian, WindowFamily::hann,
                                     WindowFamily::tukey};
  if (request.contains("families") && !request.at("families").is_null()) {
    families.clear();
    for (const auto& f : request.at("families")) {
      const auto parsed = parse_window_family(f.get<std::string>());
      if (!parsed) throw_config("families: unknown window \"" + f.get<std::string>() + "\"");
      families.push_back(*parsed);
    }
  }
  std::vector<double> multiples{0.5, 1.0, 1.5, 2.0};
  if (request.contains("sigmas") && !request.at("sigmas").is_null()) {
    multiples = request.at("sigmas").get<std::vector<double>>();
    for (double m : multiples) {
      if (!(m > 0.0)) throw_config("sigmas: must be > 0");
    }
  }
  ExperimentConfig c = config;
  if (!c.v_max) c.v_max = data.trajectory.v_max;
  const TrackConfig base = c.track_config(data.trajectory.delta_t);
  std::vector<double> sigmas;
  for (double m : multiples) sigmas.push_back(m * base.d_max());

  TrackOptions options;
  options.alignment_steps.insert(c.alignment_steps.begin(), c.alignment_steps.end());
  const SweepTable table = sigma_sweep(map, data.trajectory.scans, data.truth, families, sigmas, base, options);

  const fs::path out = request.contains("out") && request.at("out").is_string()
                           ? fs::path(request.at("out").get<std::string>())
                           : output_dir(request, "out_dir") / "sweep.csv";
  write_text_file(out, csv_string([&](std::ostream& o) { write_sweep_csv(o, table); }));
  json cells = json::array();
  for (const auto& cell : table.cells) {
    json row = report_to_json(cell.report);
    row["family"] = std::string(to_string(cell.family));
    row["sigma_m"] = cell.sigma;
    cells.push_back(std::move(row));
  }
  return {{"table", out.string()}, {"cells", cells}, {"d_max", table.d_max}};
}

json command_bench(const json& request) {
  const ExperimentConfig config = resolve_config(request);
  const RadioMap map = load_radio_map(required_string(request, "map"));
  const LoadedDataset data = load_dataset(required_string(request, "dataset"), false);
  std::size_t repeats = 5;
  if (request.contains("repeats") && !request.at("repeats").is_null()) {
    const auto& r = request.at("repeats");
    if (!r.is_number_integer() || r.get<std::int64_t>() < 1) throw_config("repeats: must be >= 1");
    repeats = r.get<std::size_t>();
  }
  ExperimentConfig c = config;
  if (!c.v_max) c.v_max = data.trajectory.v_max;
  const auto rows = runtime_bench(map, data.trajectory.scans, c, data.trajectory.delta_t, repeats);

  const fs::path out = request.contains("out") && request.at("out").is_string()
                           ? fs::path(request.at("out").get<std::string>())
                           : output_dir(request, "out_dir") / "bench.csv";
  write_text_file(out, csv_string([&](std::ostream& o) { write_bench_csv(o, rows); }));
  json list = json::array();
  for (const auto& r : rows) {
    list.push_back({{"window", std::string(to_string(r.family))},
                    {"mean_step_seconds", r.mean_step_seconds},
                    {"std_step_seconds", r.std_step_seconds},
                    {"ratio_to_memoryless", r.ratio_to_memoryless}});
  }
  return {{"table", out.string()}, {"rows", list}};
}

}  // namespace ssploc
