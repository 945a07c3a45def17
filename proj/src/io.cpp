#include "io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "error.hpp"

namespace ssploc {

namespace fs = std::filesystem;

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw_data(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw_data(path + "." + key + ": missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw_data(path + ": expected a number");
  return j.get<double>();
}

double number_field(const json& j, const char* key, const std::string& path) {
  return number(field(j, key, path), path + "." + key);
}

std::int64_t integer_field(const json& j, const char* key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_number_integer()) throw_data(path + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

std::string string_field(const json& j, const char* key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_string()) throw_data(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw_data(path + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

template <std::size_t N>
std::array<double, N> fixed_array(const json& j, const std::string& path) {
  const auto v = number_array(j, path);
  if (v.size() != N) throw_data(path + ": expected " + std::to_string(N) + " entries");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

void check_schema(const json& j, const char* schema) {
  const std::string got = string_field(j, "schema", "$");
  if (got != schema) throw_data("$.schema: expected \"" + std::string(schema) + "\", got \"" + got + "\"");
  const auto version = integer_field(j, "version", "$");
  if (version != kFormatVersion) throw_data("$.version: unsupported version " + std::to_string(version));
}

json scan_to_json(const FeatureVector& scan) {
  json row = json::array();
  for (std::size_t k = 0; k < scan.size(); ++k) {
    if (scan.missing(k)) {
      row.push_back(nullptr);
    } else {
      row.push_back(*scan.reading(k));
    }
  }
  return row;
}

FeatureVector scan_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw_data(path + ": expected an array");
  std::vector<std::optional<double>> readings;
  readings.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (j[k].is_null()) {
      readings.emplace_back();
    } else {
      readings.emplace_back(number(j[k], path + "[" + std::to_string(k) + "]"));
    }
  }
  return FeatureVector(std::move(readings));
}

std::vector<FeatureVector> scans_from_json(const json& j, const std::string& path, std::size_t n) {
  if (!j.is_array()) throw_data(path + ": expected an array");
  std::vector<FeatureVector> out;
  out.reserve(j.size());
  for (std::size_t s = 0; s < j.size(); ++s) {
    const std::string p = path + "[" + std::to_string(s) + "]";
    out.push_back(scan_from_json(j[s], p));
    if (out.back().size() != n) {
      throw_data(p + ": expected " + std::to_string(n) + " readings, got " + std::to_string(out.back().size()));
    }
  }
  if (out.empty()) throw_data(path + ": no scans");
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw_data(where + ": not a number: \"" + std::string(text) + "\"");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

json model_to_json(const LikelihoodModel& model) {
  json j;
  j["family"] = std::string(to_string(model.family()));
  std::visit(
      [&j](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GaussianParams>) {
          j["mean"] = p.mean;
          j["std"] = p.std;
        } else if constexpr (std::is_same_v<P, MixtureParams>) {
          j["weights"] = p.weights;
          j["means"] = p.means;
          j["stds"] = p.stds;
          j["fallback"] = p.fallback;
        } else if constexpr (std::is_same_v<P, LogNormalParams>) {
          j["shift"] = p.shift;
          j["log_mean"] = p.log_mean;
          j["log_std"] = p.log_std;
        } else if constexpr (std::is_same_v<P, HistogramParams>) {
          j["bin_width"] = p.bin_width;
          j["first_bin"] = p.first_bin;
          j["probabilities"] = p.probabilities;
        } else {
          j["bandwidth"] = p.bandwidth;
          j["samples"] = p.samples;
        }
      },
      model.params());
  return j;
}

LikelihoodModel model_from_json(const json& j, const std::string& path) {
  const std::string name = string_field(j, "family", path);
  const auto family = parse_model_family(name);
  if (!family) throw_data(path + ".family: unknown family \"" + name + "\"");
  try {
    switch (*family) {
      case ModelFamily::single_gaussian:
      case ModelFamily::csi_power_gaussian:
        return LikelihoodModel(*family, GaussianParams{number_field(j, "mean", path), number_field(j, "std", path)});
      case ModelFamily::double_gaussian: {
        MixtureParams p;
        p.weights = fixed_array<2>(field(j, "weights", path), path + ".weights");
        p.means = fixed_array<2>(field(j, "means", path), path + ".means");
        p.stds = fixed_array<2>(field(j, "stds", path), path + ".stds");
        p.fallback = j.value("fallback", false);
        return LikelihoodModel(*family, p);
      }
      case ModelFamily::lognormal:
        return LikelihoodModel(*family, LogNormalParams{number_field(j, "shift", path),
                                                        number_field(j, "log_mean", path),
                                                        number_field(j, "log_std", path)});
      case ModelFamily::histogram: {
        HistogramParams p;
        p.bin_width = number_field(j, "bin_width", path);
        p.first_bin = integer_field(j, "first_bin", path);
        p.probabilities = number_array(field(j, "probabilities", path), path + ".probabilities");
        return LikelihoodModel(*family, std::move(p));
      }
      case ModelFamily::kernel: {
        KernelParams p;
        p.bandwidth = number_field(j, "bandwidth", path);
        p.samples = number_array(field(j, "samples", path), path + ".samples");
        return LikelihoodModel(*family, std::move(p));
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::data && std::string(e.what()).rfind(path, 0) != 0) {
      throw_data(path + ": " + e.what());
    }
    throw;
  }
  throw_internal("unhandled model family");
}

json radio_map_to_json(const RadioMap& map) {
  json j;
  j["schema"] = "ssploc.radio_map";
  j["version"] = kFormatVersion;
  j["family"] = std::string(to_string(map.family()));
  j["feature_count"] = map.feature_count();
  j["ap_count"] = map.ap_count();
  j["grid_size"] = map.grid_size();
  json rps = json::array();
  for (const auto& rp : map.rps()) {
    json r;
    r["rp_id"] = rp.id;
    r["x"] = rp.location.x;
    r["y"] = rp.location.y;
    json models = json::array();
    for (const auto& m : rp.models) models.push_back(model_to_json(m));
    r["models"] = std::move(models);
    rps.push_back(std::move(r));
  }
  j["rps"] = std::move(rps);
  return j;
}

RadioMap radio_map_from_json(const json& j) {
  check_schema(j, "ssploc.radio_map");
  const std::string name = string_field(j, "family", "$");
  const auto family = parse_model_family(name);
  if (!family) throw_data("$.family: unknown family \"" + name + "\"");
  const auto n = integer_field(j, "feature_count", "$");
  const json& rps_json = field(j, "rps", "$");
  if (!rps_json.is_array()) throw_data("$.rps: expected an array");
  std::vector<ReferencePoint> rps;
  rps.reserve(rps_json.size());
  for (std::size_t i = 0; i < rps_json.size(); ++i) {
    const std::string path = "$.rps[" + std::to_string(i) + "]";
    const json& r = rps_json[i];
    ReferencePoint rp;
    rp.id = integer_field(r, "rp_id", path);
    rp.location = {number_field(r, "x", path), number_field(r, "y", path)};
    const json& models = field(r, "models", path);
    if (!models.is_array() || static_cast<std::int64_t>(models.size()) != n) {
      throw_data(path + ".models: expected " + std::to_string(n) + " models");
    }
    for (std::size_t k = 0; k < models.size(); ++k) {
      rp.models.push_back(model_from_json(models[k], path + ".models[" + std::to_string(k) + "]"));
    }
    rps.push_back(std::move(rp));
  }
  return RadioMap(std::move(rps), *family, j.value("grid_size", 0.0), j.value("ap_count", std::size_t{0}));
}

json training_to_json(const TrainingData& data) {
  json j;
  j["schema"] = "ssploc.scans";
  j["version"] = kFormatVersion;
  j["fingerprint"] = data.fingerprint;
  j["feature_count"] = data.sets.empty() ? 0 : data.sets.front().feature_count();
  j["ap_count"] = data.ap_count;
  j["grid_size"] = data.grid_size;
  json sets = json::array();
  for (std::size_t i = 0; i < data.sets.size(); ++i) {
    const ScanSet& s = data.sets[i];
    if (!s.location) throw_data("training set " + std::to_string(i) + " has no location");
    json r;
    r["rp_id"] = data.rp_ids.empty() ? static_cast<std::int64_t>(i) : data.rp_ids.at(i);
    r["x"] = s.location->x;
    r["y"] = s.location->y;
    json scans = json::array();
    for (const auto& scan : s.scans) scans.push_back(scan_to_json(scan));
    r["scans"] = std::move(scans);
    sets.push_back(std::move(r));
  }
  j["scan_sets"] = std::move(sets);
  return j;
}

TrainingData training_from_json(const json& j) {
  check_schema(j, "ssploc.scans");
  TrainingData data;
  data.fingerprint = string_field(j, "fingerprint", "$");
  data.ap_count = j.value("ap_count", std::size_t{0});
  data.grid_size = j.value("grid_size", 0.0);
  const auto n = static_cast<std::size_t>(integer_field(j, "feature_count", "$"));
  const json& sets = field(j, "scan_sets", "$");
  if (!sets.is_array() || sets.empty()) throw_data("$.scan_sets: expected a non-empty array");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string path = "$.scan_sets[" + std::to_string(i) + "]";
    ScanSet s;
    data.rp_ids.push_back(integer_field(sets[i], "rp_id", path));
    s.location = Location{number_field(sets[i], "x", path), number_field(sets[i], "y", path)};
    s.scans = scans_from_json(field(sets[i], "scans", path), path + ".scans", n);
    data.sets.push_back(std::move(s));
  }
  return data;
}

json trajectory_to_json(const TrajectoryData& data) {
  json j;
  j["schema"] = "ssploc.trajectory";
  j["version"] = kFormatVersion;
  j["fingerprint"] = data.fingerprint;
  j["feature_count"] = data.scans.empty() ? 0 : data.scans.front().feature_count();
  j["delta_t"] = data.delta_t;
  j["v_max"] = data.v_max;
  json steps = json::array();
  for (std::size_t t = 0; t < data.scans.size(); ++t) {
    json s;
    s["step"] = t;
    json scans = json::array();
    for (const auto& scan : data.scans[t].scans) scans.push_back(scan_to_json(scan));
    s["scans"] = std::move(scans);
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  return j;
}

TrajectoryData trajectory_from_json(const json& j) {
  check_schema(j, "ssploc.trajectory");
  TrajectoryData data;
  data.fingerprint = string_field(j, "fingerprint", "$");
  data.delta_t = number_field(j, "delta_t", "$");
  data.v_max = number_field(j, "v_max", "$");
  const auto n = static_cast<std::size_t>(integer_field(j, "feature_count", "$"));
  const json& steps = field(j, "steps", "$");
  if (!steps.is_array() || steps.empty()) throw_data("$.steps: expected a non-empty array");
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const std::string path = "$.steps[" + std::to_string(t) + "]";
    ScanSet s;
    s.scans = scans_from_json(field(steps[t], "scans", path), path + ".scans", n);
    data.scans.push_back(std::move(s));
  }
  return data;
}

std::vector<std::string> flag_names(unsigned flags) {
  std::vector<std::string> out;
  if (flags & kFlagEmptyPriorSupport) out.emplace_back("empty_prior_support");
  if (flags & kFlagAligned) out.emplace_back("aligned");
  if (flags & kFlagHistoryPerturbed) out.emplace_back("history_perturbed");
  return out;
}

json estimates_to_json(std::span<const StepEstimate> estimates, bool verbose) {
  json steps = json::array();
  for (const auto& e : estimates) {
    json s;
    s["step"] = e.step_index;
    s["x"] = e.estimate.x;
    s["y"] = e.estimate.y;
    s["flags"] = flag_names(e.flags);
    s["top_k"] = e.top_k_ids;
    if (verbose) {
      s["posterior"] = e.posterior;
      s["log_likelihoods"] = e.log_likelihoods;
    }
    steps.push_back(std::move(s));
  }
  json j;
  j["schema"] = "ssploc.estimates";
  j["version"] = kFormatVersion;
  j["steps"] = std::move(steps);
  return j;
}

json read_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw_data(path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_data("cannot write " + path.string());
  out << text;
  if (!out) throw_data("write failed for " + path.string());
}

void write_json_file(const fs::path& path, const json& j) { write_text_file(path, j.dump() + "\n"); }

void save_radio_map(const RadioMap& map, const fs::path& path) {
  write_json_file(path, radio_map_to_json(map));
}

RadioMap load_radio_map(const fs::path& path) {
  const json j = read_json_file(path);
  try {
    return radio_map_from_json(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string truth_to_csv(std::span<const Location> truth) {
  std::string out = "step,x,y\n";
  for (std::size_t t = 0; t < truth.size(); ++t) {
    out += std::to_string(t) + ',' + format_number(truth[t].x) + ',' + format_number(truth[t].y) + '\n';
  }
  return out;
}

std::vector<Location> truth_from_csv(const std::string& text) {
  const auto rows = lines(text);
  if (rows.empty() || rows.front() != "step,x,y") throw_data("truth CSV: expected header step,x,y");
  std::vector<Location> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = "truth CSV line " + std::to_string(r + 1);
    const auto cols = split(rows[r], ',');
    if (cols.size() != 3) throw_data(where + ": expected 3 columns");
    if (parse_number(cols[0], where) != static_cast<double>(out.size())) {
      throw_data(where + ": steps must be consecutive from 0");
    }
    out.push_back({parse_number(cols[1], where), parse_number(cols[2], where)});
  }
  return out;
}

std::vector<Location> load_truth_csv(const fs::path& path) { return truth_from_csv(read_text_file(path)); }

std::string csi_to_csv(const CsiMatrix& m) {
  std::string out;
  for (std::size_t h = 0; h < m.rows(); ++h) {
    for (std::size_t w = 0; w < m.cols(); ++w) {
      if (w) out += ',';
      out += format_number(m.at(h, w));
    }
    out += '\n';
  }
  return out;
}

CsiMatrix csi_from_csv(const std::string& text) {
  const auto rows = lines(text);
  if (rows.empty()) throw_data("CSI CSV: no rows");
  std::vector<std::vector<double>> values;
  values.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "CSI CSV line " + std::to_string(r + 1);
    std::vector<double> row;
    for (auto cell : split(rows[r], ',')) row.push_back(parse_number(cell, where));
    if (!values.empty() && row.size() != values.front().size()) {
      throw_data(where + ": expected " + std::to_string(values.front().size()) + " columns");
    }
    values.push_back(std::move(row));
  }
  return CsiMatrix(values);
}

CsiMatrix load_csi_csv(const fs::path& path) {
  try {
    return csi_from_csv(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string csi_index_to_csv(std::span<const CsiIndexEntry> entries) {
  std::string out = "rp_id,x,y,file\n";
  for (const auto& e : entries) {
    out += std::to_string(e.rp_id) + ',' + format_number(e.location.x) + ',' + format_number(e.location.y) +
           ',' + e.file + '\n';
  }
  return out;
}

std::vector<CsiIndexEntry> csi_index_from_csv(const std::string& text) {
  const auto rows = lines(text);
  if (rows.empty() || rows.front() != "rp_id,x,y,file") throw_data("CSI index: expected header rp_id,x,y,file");
  std::vector<CsiIndexEntry> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = "CSI index line " + std::to_string(r + 1);
    const auto cols = split(rows[r], ',');
    if (cols.size() != 4) throw_data(where + ": expected 4 columns");
    CsiIndexEntry e;
    const double id = parse_number(cols[0], where);
    if (id != std::floor(id)) throw_data(where + ": rp_id must be an integer");
    e.rp_id = static_cast<std::int64_t>(id);
    e.location = {parse_number(cols[1], where), parse_number(cols[2], where)};
    e.file = std::string(cols[3]);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CsiTrainingPoint> load_csi_training(const fs::path& index_path) {
  const auto entries = csi_index_from_csv(read_text_file(index_path));
  std::vector<CsiTrainingPoint> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    out.push_back({e.rp_id, e.location, load_csi_csv(index_path.parent_path() / e.file)});
  }
  return out;
}

}  // namespace ssploc
