#include <ssploc/ssploc.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "engine.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "io.hpp"

struct ssploc_map {
  std::shared_ptr<const ssploc::RadioMap> map;
};

struct ssploc_tracker {
  std::shared_ptr<const ssploc::RadioMap> map;
  ssploc::TrackConfig config;
  ssploc::TrackState state;
  std::vector<double> posterior;
  bool align_next = false;
};

namespace {

thread_local std::string g_last_error;

ssploc_status fail(ssploc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
ssploc_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SSPLOC_OK;
  } catch (const ssploc::Error& e) {
    return fail(static_cast<ssploc_status>(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(SSPLOC_ERR_CONFIG, std::string("request: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(SSPLOC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SSPLOC_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ssploc::WindowFamily to_family(ssploc_window w) {
  switch (w) {
    case SSPLOC_WINDOW_CIRCULAR: return ssploc::WindowFamily::circular;
    case SSPLOC_WINDOW_GAUSSIAN: return ssploc::WindowFamily::gaussian;
    case SSPLOC_WINDOW_HANN: return ssploc::WindowFamily::hann;
    case SSPLOC_WINDOW_TUKEY: return ssploc::WindowFamily::tukey;
    case SSPLOC_WINDOW_UNIFORM: return ssploc::WindowFamily::uniform;
  }
  ssploc::throw_argument("unknown window " + std::to_string(static_cast<int>(w)));
}

template <typename Command>
ssploc_status run_command(Command command, const char* request, char** response) {
  if (!request || !response) return fail(SSPLOC_ERR_ARGUMENT, "null request or response pointer");
  *response = nullptr;
  return guarded([&] {
    const auto parsed = nlohmann::json::parse(request, nullptr, false);
    if (parsed.is_discarded()) ssploc::throw_config("request is not valid JSON");
    *response = dup_string(command(parsed).dump());
  });
}

}  // namespace

extern "C" {

const char* ssploc_version(void) { return "1.0.0"; }

const char* ssploc_last_error(void) { return g_last_error.c_str(); }

void ssploc_string_free(char* s) { std::free(s); }

ssploc_status ssploc_window_prob(ssploc_window window, double sigma, double d, double* out) {
  if (!out) return fail(SSPLOC_ERR_ARGUMENT, "null output pointer");
  return guarded([&] { *out = ssploc::window_prob({to_family(window), sigma}, d); });
}

ssploc_status ssploc_map_load(const char* path, ssploc_map** out) {
  if (!path || !out) return fail(SSPLOC_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto map = std::make_shared<const ssploc::RadioMap>(ssploc::load_radio_map(path));
    *out = new ssploc_map{std::move(map)};
  });
}

ssploc_status ssploc_map_save(const ssploc_map* map, const char* path) {
  if (!map || !path) return fail(SSPLOC_ERR_ARGUMENT, "null argument");
  return guarded([&] { ssploc::save_radio_map(*map->map, path); });
}

void ssploc_map_free(ssploc_map* map) { delete map; }

size_t ssploc_map_rp_count(const ssploc_map* map) { return map ? map->map->rp_count() : 0; }

size_t ssploc_map_feature_count(const ssploc_map* map) { return map ? map->map->feature_count() : 0; }

const char* ssploc_map_family(const ssploc_map* map) {
  // to_string returns views of string literals, so data() is terminated.
  return map ? ssploc::to_string(map->map->family()).data() : "";
}

ssploc_status ssploc_map_rp(const ssploc_map* map, size_t index, int64_t* id, double* x, double* y) {
  if (!map) return fail(SSPLOC_ERR_ARGUMENT, "null map");
  if (index >= map->map->rp_count()) return fail(SSPLOC_ERR_ARGUMENT, "rp index out of range");
  const auto& rp = map->map->rp(index);
  if (id) *id = rp.id;
  if (x) *x = rp.location.x;
  if (y) *y = rp.location.y;
  return SSPLOC_OK;
}

ssploc_status ssploc_map_evaluate(const ssploc_map* map, size_t rp, size_t feature, double x,
                                  double* density) {
  if (!map || !density) return fail(SSPLOC_ERR_ARGUMENT, "null argument");
  if (rp >= map->map->rp_count() || feature >= map->map->feature_count()) {
    return fail(SSPLOC_ERR_ARGUMENT, "rp or feature index out of range");
  }
  return guarded([&] { *density = map->map->model(rp, feature).evaluate(x); });
}

void ssploc_track_options_default(ssploc_track_options* options) {
  if (!options) return;
  options->window = SSPLOC_WINDOW_GAUSSIAN;
  options->sigma = 4.0;
  options->v_max = 4.0;
  options->delta_t = 1.0;
  options->top_k = 1;
  options->matching = SSPLOC_MATCH_PER_SCAN;
  options->weighted_top_k = 0;
}

ssploc_status ssploc_tracker_new(const ssploc_map* map, const ssploc_track_options* options,
                                 ssploc_tracker** out) {
  if (!map || !options || !out) return fail(SSPLOC_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    ssploc::TrackConfig cfg;
    cfg.window = {to_family(options->window), options->sigma};
    cfg.v_max = options->v_max;
    cfg.delta_t = options->delta_t;
    cfg.top_k = options->top_k;
    if (options->matching == SSPLOC_MATCH_PER_SCAN) {
      cfg.matching = ssploc::MatchingMode::per_scan_product;
    } else if (options->matching == SSPLOC_MATCH_MEAN_SCAN) {
      cfg.matching = ssploc::MatchingMode::mean_scan;
    } else {
      ssploc::throw_argument("unknown matching mode");
    }
    cfg.weighted_top_k = options->weighted_top_k != 0;
    cfg.validate();
    *out = new ssploc_tracker{map->map, cfg, {}, {}, false};
  });
}

void ssploc_tracker_free(ssploc_tracker* tracker) { delete tracker; }

ssploc_status ssploc_tracker_step(ssploc_tracker* tracker, const double* readings, size_t scan_count,
                                  size_t feature_count, ssploc_step_result* result) {
  if (!tracker || !readings || !result) return fail(SSPLOC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (scan_count == 0) ssploc::throw_argument("at least one scan is required");
    ssploc::ScanSet scans;
    for (size_t s = 0; s < scan_count; ++s) {
      std::vector<std::optional<double>> row(feature_count);
      for (size_t k = 0; k < feature_count; ++k) {
        const double v = readings[s * feature_count + k];
        if (!std::isnan(v)) row[k] = v;
      }
      scans.scans.emplace_back(std::move(row));
    }
    unsigned extra = 0;
    if (tracker->align_next) {
      tracker->state.previous_estimate.reset();
      tracker->align_next = false;
      extra = ssploc::kFlagAligned;
    }
    ssploc::StepResult r = ssploc::step(*tracker->map, tracker->state, scans, tracker->config);
    tracker->state = r.state;
    tracker->posterior = std::move(r.estimate.posterior);
    result->x = r.estimate.estimate.x;
    result->y = r.estimate.estimate.y;
    result->step_index = r.estimate.step_index;
    result->flags = r.estimate.flags | extra;
  });
}

ssploc_status ssploc_tracker_posterior(const ssploc_tracker* tracker, double* out, size_t len) {
  if (!tracker || !out) return fail(SSPLOC_ERR_ARGUMENT, "null argument");
  if (tracker->posterior.empty()) return fail(SSPLOC_ERR_ARGUMENT, "no step has run yet");
  if (len != tracker->posterior.size()) {
    return fail(SSPLOC_ERR_ARGUMENT, "posterior length is " + std::to_string(tracker->posterior.size()));
  }
  std::memcpy(out, tracker->posterior.data(), len * sizeof(double));
  return SSPLOC_OK;
}

ssploc_status ssploc_tracker_align(ssploc_tracker* tracker) {
  if (!tracker) return fail(SSPLOC_ERR_ARGUMENT, "null tracker");
  tracker->align_next = true;
  return SSPLOC_OK;
}

ssploc_status ssploc_run_gen(const char* request, char** response) {
  return run_command(ssploc::command_gen, request, response);
}
ssploc_status ssploc_run_train(const char* request, char** response) {
  return run_command(ssploc::command_train, request, response);
}
ssploc_status ssploc_run_track(const char* request, char** response) {
  return run_command(ssploc::command_track, request, response);
}
ssploc_status ssploc_run_sweep(const char* request, char** response) {
  return run_command(ssploc::command_sweep, request, response);
}
ssploc_status ssploc_run_bench(const char* request, char** response) {
  return run_command(ssploc::command_bench, request, response);
}

}  // extern "C"
