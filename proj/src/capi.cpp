#include "ocm/ocm.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "ocm/commands.hpp"
#include "ocm/dual.hpp"
#include "ocm/error.hpp"
#include "ocm/fpp.hpp"

struct ocm_series {
  ocm::SnapshotSeries series;
};

struct ocm_window {
  explicit ocm_window(const ocm::EventWindow& w) : dual(w) {}
  ocm::DualEngine dual;
  std::optional<ocm::LatticeState> inits[4];

  const ocm::LatticeState& init(ocm::ModelKind kind) {
    auto& slot = inits[static_cast<std::size_t>(kind)];
    if (!slot) slot = ocm::init_default(kind, dual.window().box());
    return *slot;
  }
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
ocm_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return OCM_OK;
  } catch (const ocm::Error& e) {
    g_last_error = e.what();
    return static_cast<ocm_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return OCM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OCM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return OCM_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  ocm::require(p != nullptr, ocm::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

ocm::ModelKind to_kind(ocm_model m) {
  ocm::require(m >= OCM_MODEL_RICHARDSON && m <= OCM_MODEL_HOSTILE_COMPETITION, ocm::ErrorCode::InvalidArgument,
               "unknown model value");
  return static_cast<ocm::ModelKind>(m);
}

ocm::CellState to_state(ocm_state s) {
  ocm::require(s >= OCM_STATE_VACANT && s <= OCM_STATE_BLACK, ocm::ErrorCode::InvalidArgument, "unknown state value");
  return static_cast<ocm::CellState>(s);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ocm::RunConfig to_run_config(const ocm_config* c) {
  need(c, "config");
  ocm::RunConfig r;
  r.seed = c->seed;
  ocm::require(c->model_count <= 4, ocm::ErrorCode::InvalidArgument, "at most four models");
  for (std::size_t i = 0; i < c->model_count; ++i) r.models.push_back(to_kind(c->models[i]));
  if (c->t_max >= 0.0) r.t_max = c->t_max;
  if (c->checkpoint_count > 0) {
    need(c->checkpoints, "checkpoints");
    r.checkpoints.assign(c->checkpoints, c->checkpoints + c->checkpoint_count);
  }
  if (c->box_side > 0) r.box_side = c->box_side;
  r.alpha = c->alpha;
  r.delta = c->delta;
  r.eps = c->eps;
  r.rho = c->rho;
  if (c->replicates > 0) r.replicates = c->replicates;
  if (c->samples > 0) r.samples = c->samples;
  r.trials = c->trials;
  r.k_max = c->k_max;
  r.walk_runs = c->walk_runs;
  if (c->n > 0) r.n = c->n;
  r.angles = c->angles;
  r.jobs = c->jobs;
  if (c->out_dir) r.out_dir = c->out_dir;
  r.ppm = c->write_ppm != 0;
  r.shape_from_mu = c->shape_from_mu != 0;
  return r;
}

}  // namespace

extern "C" {

const char* ocm_last_error(void) { return g_last_error.c_str(); }

const char* ocm_version(void) { return "1.0.0"; }

void ocm_string_free(char* s) { std::free(s); }

ocm_status ocm_parse_model(const char* name, ocm_model* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = static_cast<ocm_model>(ocm::parse_model_kind(name));
  });
}

ocm_status ocm_run(uint64_t seed, const ocm_model* models, size_t model_count, double t_max,
                   const double* checkpoints, size_t checkpoint_count, int32_t box_side, ocm_series** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    ocm::require(model_count >= 1, ocm::ErrorCode::InvalidArgument, "at least one model is required");
    need(models, "models");
    std::vector<ocm::ModelKind> kinds;
    for (std::size_t i = 0; i < model_count; ++i) kinds.push_back(to_kind(models[i]));
    std::vector<double> cps;
    if (checkpoint_count > 0) {
      need(checkpoints, "checkpoints");
      cps.assign(checkpoints, checkpoints + checkpoint_count);
    } else {
      cps.push_back(t_max);
    }
    ocm::BoxPolicy policy;
    if (box_side > 0) policy.side = box_side;
    auto handle = std::make_unique<ocm_series>();
    handle->series = ocm::coupled_run(seed, kinds, t_max, cps, policy);
    *out = handle.release();
  });
}

void ocm_series_free(ocm_series* series) { delete series; }

ocm_status ocm_series_box(const ocm_series* series, int32_t* max_x, int32_t* max_y) {
  return guarded([&] {
    need(series, "series");
    need(max_x, "max_x");
    need(max_y, "max_y");
    *max_x = series->series.box.max_x;
    *max_y = series->series.box.max_y;
  });
}

ocm_status ocm_series_checkpoints(const ocm_series* series, size_t* count) {
  return guarded([&] {
    need(series, "series");
    need(count, "count");
    *count = series->series.checkpoints.size();
  });
}

ocm_status ocm_series_checkpoint_time(const ocm_series* series, size_t checkpoint, double* time) {
  return guarded([&] {
    need(series, "series");
    need(time, "time");
    ocm::require(checkpoint < series->series.checkpoints.size(), ocm::ErrorCode::InvalidArgument,
                 "checkpoint index out of range");
    *time = series->series.checkpoints[checkpoint].time;
  });
}

ocm_status ocm_series_truncated(const ocm_series* series, int* truncated) {
  return guarded([&] {
    need(series, "series");
    need(truncated, "truncated");
    *truncated = series->series.truncated ? 1 : 0;
  });
}

ocm_status ocm_series_state(const ocm_series* series, size_t checkpoint, ocm_model model, int32_t x, int32_t y,
                            ocm_state* out) {
  return guarded([&] {
    need(series, "series");
    need(out, "out");
    ocm::require(checkpoint < series->series.checkpoints.size(), ocm::ErrorCode::InvalidArgument,
                 "checkpoint index out of range");
    *out = static_cast<ocm_state>(series->series.state(checkpoint, to_kind(model)).at(ocm::Site{x, y}));
  });
}

ocm_status ocm_series_count(const ocm_series* series, size_t checkpoint, ocm_model model, ocm_state state,
                            size_t* out) {
  return guarded([&] {
    need(series, "series");
    need(out, "out");
    ocm::require(checkpoint < series->series.checkpoints.size(), ocm::ErrorCode::InvalidArgument,
                 "checkpoint index out of range");
    const ocm::LatticeState& st = series->series.state(checkpoint, to_kind(model));
    const ocm::CellState s = to_state(state);
    if (s == ocm::default_state(st.kind(), ocm::Site{1, 1})) {
      // Default states are not stored; count them from the dense grid.
      const ocm::DenseGrid g = st.dense();
      *out = static_cast<std::size_t>(std::count(g.cells.begin(), g.cells.end(), s));
    } else {
      *out = st.count(s);
    }
  });
}

ocm_status ocm_window_create(uint64_t seed, int32_t side, double horizon, ocm_window** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new ocm_window(ocm::EventWindow{seed, side, horizon});
  });
}

void ocm_window_free(ocm_window* window) { delete window; }

ocm_status ocm_voter_color(ocm_window* window, ocm_model model, int32_t x, int32_t y, double t,
                           ocm_state* out) {
  return guarded([&] {
    need(window, "window");
    need(out, "out");
    const ocm::ModelKind kind = to_kind(model);
    ocm::require(ocm::is_hostile(kind), ocm::ErrorCode::InvalidArgument, "voter_color needs a hostile model");
    *out = static_cast<ocm_state>(window->dual.voter_color(ocm::Site{x, y}, t, window->init(kind)));
  });
}

ocm_status ocm_competition_color(ocm_window* window, ocm_model model, int32_t x, int32_t y, double t,
                                 ocm_state* out) {
  return guarded([&] {
    need(window, "window");
    need(out, "out");
    const ocm::ModelKind kind = to_kind(model);
    ocm::require(!ocm::is_hostile(kind), ocm::ErrorCode::InvalidArgument,
                 "competition_color needs an occupancy model");
    *out = static_cast<ocm_state>(window->dual.competition_color(ocm::Site{x, y}, t, window->init(kind)));
  });
}

ocm_status ocm_voter_terminus(const ocm_window* window, int32_t x, int32_t y, double t, int32_t* tx, int32_t* ty) {
  return guarded([&] {
    need(window, "window");
    need(tx, "tx");
    need(ty, "ty");
    const ocm::VoterPathTrace trace = window->dual.trace_voter_path(ocm::Site{x, y}, t);
    *tx = trace.terminus.x;
    *ty = trace.terminus.y;
  });
}

ocm_status ocm_ancestor_count(ocm_window* window, int32_t x, int32_t y, double t, size_t* out) {
  return guarded([&] {
    need(window, "window");
    need(out, "out");
    *out = window->dual.potential_ancestors(ocm::Site{x, y}, t, window->init(ocm::ModelKind::Competition)).members.size();
  });
}

ocm_status ocm_fpp_mu_estimate(uint64_t seed, double dx, double dy, int64_t n, size_t replicates, size_t jobs,
                               double* mean, double* ci_low, double* ci_high) {
  return guarded([&] {
    need(mean, "mean");
    const ocm::MuEstimate m = ocm::mu_estimate(seed, ocm::Point{dx, dy}, n, replicates, jobs == 0 ? 1 : jobs);
    *mean = m.summary.mean;
    if (ci_low) *ci_low = m.summary.ci_low();
    if (ci_high) *ci_high = m.summary.ci_high();
  });
}

void ocm_config_init(ocm_config* config) {
  if (!config) return;
  const ocm::RunConfig d;
  *config = ocm_config{};
  config->seed = 0;
  config->model_count = 0;
  config->t_max = -1.0;
  config->checkpoints = nullptr;
  config->checkpoint_count = 0;
  config->box_side = 0;
  config->alpha = d.alpha;
  config->delta = d.delta;
  config->eps = d.eps;
  config->rho = d.rho;
  config->replicates = 0;
  config->samples = 0;
  config->trials = d.trials;
  config->k_max = d.k_max;
  config->walk_runs = d.walk_runs;
  config->n = 0;
  config->angles = d.angles;
  config->jobs = d.jobs;
  config->out_dir = nullptr;
  config->write_ppm = 0;
  config->shape_from_mu = 0;
}

ocm_status ocm_cmd_simulate(const ocm_config* config, int* truncated) {
  return guarded([&] {
    const ocm::SimulateOutcome out = ocm::cmd_simulate(to_run_config(config));
    if (truncated) *truncated = out.series.truncated ? 1 : 0;
  });
}

ocm_status ocm_cmd_verify(const ocm_config* config, const char* suite, char** json, int* hard_failure) {
  return guarded([&] {
    need(suite, "suite");
    need(json, "json");
    *json = nullptr;
    const ocm::VerifyOutcome out = ocm::cmd_verify(to_run_config(config), suite);
    if (hard_failure) *hard_failure = out.hard_failure ? 1 : 0;
    *json = copy_string(ocm::dump_json(out.report));
  });
}

ocm_status ocm_cmd_shape(const ocm_config* config) {
  return guarded([&] { ocm::cmd_shape(to_run_config(config)); });
}

ocm_status ocm_cmd_walk(const ocm_config* config) {
  return guarded([&] { ocm::cmd_walk(to_run_config(config)); });
}

ocm_status ocm_cmd_mu(const ocm_config* config, double dx, double dy, char** json) {
  return guarded([&] {
    need(json, "json");
    *json = nullptr;
    *json = copy_string(ocm::dump_json(ocm::cmd_mu(to_run_config(config), ocm::Point{dx, dy})));
  });
}

ocm_status ocm_cmd_render(const char* csv_path, const char* out_path, const char* kind, int32_t max_x,
                          int32_t max_y) {
  return guarded([&] {
    need(csv_path, "csv_path");
    need(out_path, "out_path");
    std::optional<ocm::ModelKind> k;
    if (kind) k = ocm::parse_model_kind(kind);
    std::optional<ocm::Box> box;
    if (max_x >= 0 && max_y >= 0) box = ocm::Box{max_x, max_y};
    ocm::cmd_render(csv_path, out_path, k, box);
  });
}

ocm_status ocm_cmd_events(const ocm_config* config, const char* out_path) {
  return guarded([&] {
    need(out_path, "out_path");
    ocm::cmd_events(to_run_config(config), out_path);
  });
}

ocm_status ocm_cmd_trace(const ocm_config* config, int32_t x, int32_t y, double t, const char* out_path) {
  return guarded([&] {
    need(out_path, "out_path");
    ocm::cmd_trace(to_run_config(config), ocm::Site{x, y}, t, out_path);
  });
}

}  // extern "C"
