#ifndef SSPLOC_SSPLOC_H
#define SSPLOC_SSPLOC_H

/* C interface to the ssploc fingerprint localization library.
 *
 * Every fallible call returns an ssploc_status; on failure the message is
 * available from ssploc_last_error() on the same thread until the next call.
 * Handles are opaque. A map may be shared by several trackers and must
 * outlive none of them: trackers keep their own reference.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SSPLOC_BUILDING_LIBRARY)
#    define SSPLOC_API __declspec(dllexport)
#  else
#    define SSPLOC_API __declspec(dllimport)
#  endif
#else
#  define SSPLOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssploc_status {
  SSPLOC_OK = 0,
  SSPLOC_ERR_ARGUMENT = 1, /* bad value passed to a call */
  SSPLOC_ERR_CONFIG = 2,   /* bad configuration or request field */
  SSPLOC_ERR_DATA = 3,     /* unreadable or malformed input file */
  SSPLOC_ERR_INTERNAL = 4
} ssploc_status;

typedef enum ssploc_window {
  SSPLOC_WINDOW_CIRCULAR = 0,
  SSPLOC_WINDOW_GAUSSIAN = 1,
  SSPLOC_WINDOW_HANN = 2,
  SSPLOC_WINDOW_TUKEY = 3,
  SSPLOC_WINDOW_UNIFORM = 4
} ssploc_window;

typedef enum ssploc_matching {
  SSPLOC_MATCH_PER_SCAN = 0, /* product over every scan */
  SSPLOC_MATCH_MEAN_SCAN = 1 /* average the scans first */
} ssploc_matching;

/* step_result.flags bits */
#define SSPLOC_FLAG_EMPTY_PRIOR 1u
#define SSPLOC_FLAG_ALIGNED 2u
#define SSPLOC_FLAG_HISTORY_PERTURBED 4u

typedef struct ssploc_map ssploc_map;
typedef struct ssploc_tracker ssploc_tracker;

SSPLOC_API const char* ssploc_version(void);
SSPLOC_API const char* ssploc_last_error(void);
/* Frees strings returned through char** out-parameters. */
SSPLOC_API void ssploc_string_free(char* s);

/* Unnormalized prior weight at distance d (meters) for a window of width
 * sigma (meters). */
SSPLOC_API ssploc_status ssploc_window_prob(ssploc_window window, double sigma, double d, double* out);

/* Radio maps */
SSPLOC_API ssploc_status ssploc_map_load(const char* path, ssploc_map** out);
SSPLOC_API ssploc_status ssploc_map_save(const ssploc_map* map, const char* path);
SSPLOC_API void ssploc_map_free(ssploc_map* map);
SSPLOC_API size_t ssploc_map_rp_count(const ssploc_map* map);
SSPLOC_API size_t ssploc_map_feature_count(const ssploc_map* map);
/* Static string, e.g. "single_gaussian". */
SSPLOC_API const char* ssploc_map_family(const ssploc_map* map);
SSPLOC_API ssploc_status ssploc_map_rp(const ssploc_map* map, size_t index, int64_t* id, double* x,
                                       double* y);
/* Floored density of feature value x under the model of (rp, feature). */
SSPLOC_API ssploc_status ssploc_map_evaluate(const ssploc_map* map, size_t rp, size_t feature, double x,
                                             double* density);

/* Trackers */
typedef struct ssploc_track_options {
  ssploc_window window;
  double sigma; /* meters */
  double v_max; /* m/s */
  double delta_t; /* s */
  size_t top_k;
  ssploc_matching matching;
  int weighted_top_k;
} ssploc_track_options;

/* gaussian window, sigma 4 m, v_max 4 m/s, delta_t 1 s, top_k 1. */
SSPLOC_API void ssploc_track_options_default(ssploc_track_options* options);

typedef struct ssploc_step_result {
  double x;
  double y;
  size_t step_index;
  unsigned flags;
} ssploc_step_result;

SSPLOC_API ssploc_status ssploc_tracker_new(const ssploc_map* map, const ssploc_track_options* options,
                                            ssploc_tracker** out);
SSPLOC_API void ssploc_tracker_free(ssploc_tracker* tracker);
/* readings holds scan_count rows of feature_count values, row-major; NaN
 * marks a missing reading. */
SSPLOC_API ssploc_status ssploc_tracker_step(ssploc_tracker* tracker, const double* readings,
                                             size_t scan_count, size_t feature_count,
                                             ssploc_step_result* result);
/* Copies the last step's posterior; len must equal the map's RP count. */
SSPLOC_API ssploc_status ssploc_tracker_posterior(const ssploc_tracker* tracker, double* out, size_t len);
/* Forget the previous estimate; the next step uses a uniform prior. */
SSPLOC_API ssploc_status ssploc_tracker_align(ssploc_tracker* tracker);

/* Command runners. request is a JSON object; on success *response receives a
 * JSON summary to be released with ssploc_string_free. */
SSPLOC_API ssploc_status ssploc_run_gen(const char* request, char** response);
SSPLOC_API ssploc_status ssploc_run_train(const char* request, char** response);
SSPLOC_API ssploc_status ssploc_run_track(const char* request, char** response);
SSPLOC_API ssploc_status ssploc_run_sweep(const char* request, char** response);
SSPLOC_API ssploc_status ssploc_run_bench(const char* request, char** response);

#ifdef __cplusplus
}
#endif

#endif
