#ifndef OCM_OCM_H
#define OCM_OCM_H

/*
 * C interface to the oriented competition model library.
 *
 * Every function returns an ocm_status. On failure the thread-local message
 * from ocm_last_error() describes the problem. Handles are opaque and owned
 * by the caller; release them with the matching *_free function. Strings
 * returned through char** must be released with ocm_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(OCM_BUILDING_LIBRARY)
#define OCM_API __declspec(dllexport)
#else
#define OCM_API __declspec(dllimport)
#endif
#else
#define OCM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ocm_status {
  OCM_OK = 0,
  OCM_ERR_INVALID_ARGUMENT = 1,
  OCM_ERR_SIZING = 2,
  OCM_ERR_OUT_OF_BOX = 3,
  OCM_ERR_DEPTH_EXCEEDED = 4,
  OCM_ERR_IO = 5,
  OCM_ERR_PARSE = 6,
  OCM_ERR_UNKNOWN_SUITE = 7,
  OCM_ERR_INTERNAL = 99
} ocm_status;

typedef enum ocm_model {
  OCM_MODEL_RICHARDSON = 0,
  OCM_MODEL_COMPETITION = 1,
  OCM_MODEL_HOSTILE_GROWTH = 2,
  OCM_MODEL_HOSTILE_COMPETITION = 3
} ocm_model;

typedef enum ocm_state {
  OCM_STATE_VACANT = 0,
  OCM_STATE_RED = 1,
  OCM_STATE_BLUE = 2,
  OCM_STATE_WHITE = 3,
  OCM_STATE_BLACK = 4
} ocm_state;

/* Message of the last failed call on this thread ("" after success). */
OCM_API const char* ocm_last_error(void);
OCM_API const char* ocm_version(void);
OCM_API void ocm_string_free(char* s);

/* Accepts richardson, competition, hostile-growth, hostile-competition. */
OCM_API ocm_status ocm_parse_model(const char* name, ocm_model* out);

/* ---- forward runs ------------------------------------------------------ */

typedef struct ocm_series ocm_series;

/* Coupled run of `model_count` models from the default configuration.
 * box_side <= 0 selects ceil(3 t_max) + 32. checkpoint_count == 0 means {t_max}. */
OCM_API ocm_status ocm_run(uint64_t seed, const ocm_model* models, size_t model_count, double t_max,
                           const double* checkpoints, size_t checkpoint_count, int32_t box_side, ocm_series** out);
OCM_API void ocm_series_free(ocm_series* series);
OCM_API ocm_status ocm_series_box(const ocm_series* series, int32_t* max_x, int32_t* max_y);
OCM_API ocm_status ocm_series_checkpoints(const ocm_series* series, size_t* count);
OCM_API ocm_status ocm_series_checkpoint_time(const ocm_series* series, size_t checkpoint, double* time);
OCM_API ocm_status ocm_series_truncated(const ocm_series* series, int* truncated);
OCM_API ocm_status ocm_series_state(const ocm_series* series, size_t checkpoint, ocm_model model, int32_t x,
                                    int32_t y, ocm_state* out);
OCM_API ocm_status ocm_series_count(const ocm_series* series, size_t checkpoint, ocm_model model, ocm_state state,
                                    size_t* out);

/* ---- reverse-time queries ---------------------------------------------- */

typedef struct ocm_window ocm_window;

OCM_API ocm_status ocm_window_create(uint64_t seed, int32_t side, double horizon, ocm_window** out);
OCM_API void ocm_window_free(ocm_window* window);
/* Color of (x,y,t) in the given hostile model from its default configuration. */
OCM_API ocm_status ocm_voter_color(ocm_window* window, ocm_model model, int32_t x, int32_t y, double t,
                                   ocm_state* out);
/* Color of (x,y,t) in the given occupancy model from its default configuration. */
OCM_API ocm_status ocm_competition_color(ocm_window* window, ocm_model model, int32_t x, int32_t y, double t,
                                         ocm_state* out);
OCM_API ocm_status ocm_voter_terminus(const ocm_window* window, int32_t x, int32_t y, double t, int32_t* tx,
                                      int32_t* ty);
/* Number of initially occupied sites reachable backward from (x,y,t). */
OCM_API ocm_status ocm_ancestor_count(ocm_window* window, int32_t x, int32_t y, double t, size_t* out);

/* ---- first-passage percolation ----------------------------------------- */

OCM_API ocm_status ocm_fpp_mu_estimate(uint64_t seed, double dx, double dy, int64_t n, size_t replicates, size_t jobs,
                                       double* mean, double* ci_low, double* ci_high);

/* ---- batch commands ----------------------------------------------------- */

typedef struct ocm_config {
  uint64_t seed;
  ocm_model models[4];
  size_t model_count;       /* 0: command default */
  double t_max;             /* < 0: command default */
  const double* checkpoints;
  size_t checkpoint_count;  /* 0: {t_max} */
  int32_t box_side;         /* <= 0: ceil(3 t_max) + 32 */
  double alpha;
  double delta;
  double eps;
  double rho;
  size_t replicates;        /* 0: command default */
  size_t samples;           /* 0: command default */
  size_t trials;
  size_t k_max;
  size_t walk_runs;
  int64_t n;                /* <= 0: command default */
  size_t angles;
  size_t jobs;
  const char* out_dir;      /* NULL: current directory */
  int write_ppm;
  int shape_from_mu;
} ocm_config;

/* Fills every field with its documented default. */
OCM_API void ocm_config_init(ocm_config* config);

OCM_API ocm_status ocm_cmd_simulate(const ocm_config* config, int* truncated);
/* Suite report as JSON; hard_failure is set when an exact check fails. */
OCM_API ocm_status ocm_cmd_verify(const ocm_config* config, const char* suite, char** json, int* hard_failure);
OCM_API ocm_status ocm_cmd_shape(const ocm_config* config);
OCM_API ocm_status ocm_cmd_walk(const ocm_config* config);
OCM_API ocm_status ocm_cmd_mu(const ocm_config* config, double dx, double dy, char** json);
/* kind may be NULL and max_x/max_y negative to read them from manifest.json next to the CSV. */
OCM_API ocm_status ocm_cmd_render(const char* csv_path, const char* out_path, const char* kind, int32_t max_x,
                                  int32_t max_y);
OCM_API ocm_status ocm_cmd_events(const ocm_config* config, const char* out_path);
OCM_API ocm_status ocm_cmd_trace(const ocm_config* config, int32_t x, int32_t y, double t, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* OCM_OCM_H */
