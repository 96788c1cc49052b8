// Command-line front end. Uses only the C interface in ocm/ocm.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ocm/ocm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitHardFailure = 2;
constexpr int kExitConfig = 3;

struct Options {
  std::uint64_t seed = 0;
  std::vector<std::string> models;
  std::optional<double> t;
  std::vector<double> checkpoints;
  std::optional<std::int32_t> box;
  double alpha = 0.75;
  double delta = 0.1;
  double eps = 0.2;
  double rho = 0.2;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> samples;
  std::size_t trials = 100000;
  std::size_t k_max = 10000;
  std::size_t walk_runs = 100;
  std::optional<std::int64_t> n;
  std::size_t angles = 64;
  std::size_t jobs = 1;
  std::string out;
  bool ppm = false;
  bool from_mu = false;

  std::string suite;
  std::vector<double> direction{1.0, 1.0};
  std::vector<std::int32_t> site;
  double time = 0.0;
  std::string csv;
  std::string kind;
  std::vector<std::int32_t> render_box;
};

int exit_code_for(ocm_status s) {
  switch (s) {
    case OCM_OK:
      return kExitOk;
    case OCM_ERR_INTERNAL:
    case OCM_ERR_DEPTH_EXCEEDED:
      return kExitInternal;
    default:
      return kExitConfig;
  }
}

int report(ocm_status s) {
  if (s != OCM_OK) std::cerr << "error: " << ocm_last_error() << "\n";
  return exit_code_for(s);
}

class Config {
 public:
  explicit Config(const Options& o) {
    ocm_config_init(&c_);
    c_.seed = o.seed;
    c_.t_max = o.t.value_or(-1.0);
    c_.checkpoints = o.checkpoints.empty() ? nullptr : o.checkpoints.data();
    c_.checkpoint_count = o.checkpoints.size();
    c_.box_side = o.box.value_or(0);
    c_.alpha = o.alpha;
    c_.delta = o.delta;
    c_.eps = o.eps;
    c_.rho = o.rho;
    c_.replicates = o.replicates.value_or(0);
    c_.samples = o.samples.value_or(0);
    c_.trials = o.trials;
    c_.k_max = o.k_max;
    c_.walk_runs = o.walk_runs;
    c_.n = o.n.value_or(0);
    c_.angles = o.angles;
    c_.jobs = o.jobs;
    c_.write_ppm = o.ppm ? 1 : 0;
    c_.shape_from_mu = o.from_mu ? 1 : 0;
  }

  // Parses model names; returns OCM_OK or the parse failure.
  ocm_status set_models(const std::vector<std::string>& names) {
    if (names.size() > 4) return OCM_ERR_INVALID_ARGUMENT;
    for (const std::string& name : names) {
      ocm_model m;
      if (ocm_status s = ocm_parse_model(name.c_str(), &m); s != OCM_OK) return s;
      c_.models[c_.model_count++] = m;
    }
    return OCM_OK;
  }

  void set_out_dir(const std::string& dir) {
    out_dir_ = dir;
    c_.out_dir = out_dir_.empty() ? nullptr : out_dir_.c_str();
  }

  const ocm_config* get() const { return &c_; }

 private:
  ocm_config c_{};
  std::string out_dir_;
};

bool emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  ocm_string_free(s);
  return out;
}

void add_common(CLI::App* app, Options& o, bool seed_required = true) {
  auto* seed = app->add_option("--seed", o.seed, "64-bit seed");
  if (seed_required) seed->required();
  app->add_option("--t", o.t, "time horizon");
  app->add_option("--box", o.box, "box side override");
  app->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

void add_model(CLI::App* app, Options& o) {
  app->add_option("--model", o.models, "model (repeatable)")->take_all();
}

int run_simulate(const Options& o) {
  Config c(o);
  if (ocm_status s = c.set_models(o.models); s != OCM_OK) return report(s);
  c.set_out_dir(o.out);
  int truncated = 0;
  if (ocm_status s = ocm_cmd_simulate(c.get(), &truncated); s != OCM_OK) return report(s);
  if (truncated) std::cerr << "warning: run reached the box edge; snapshots are truncated\n";
  return kExitOk;
}

int run_verify(const Options& o) {
  Config c(o);
  if (ocm_status s = c.set_models(o.models); s != OCM_OK) return report(s);
  char* json = nullptr;
  int hard = 0;
  if (ocm_status s = ocm_cmd_verify(c.get(), o.suite.c_str(), &json, &hard); s != OCM_OK) return report(s);
  if (!emit(take(json), o.out)) {
    std::cerr << "error: cannot write " << o.out << "\n";
    return kExitConfig;
  }
  return hard ? kExitHardFailure : kExitOk;
}

int run_shape(const Options& o) {
  Config c(o);
  if (ocm_status s = c.set_models(o.models); s != OCM_OK) return report(s);
  c.set_out_dir(o.out);
  return report(ocm_cmd_shape(c.get()));
}

int run_walk(const Options& o) {
  Config c(o);
  c.set_out_dir(o.out);
  return report(ocm_cmd_walk(c.get()));
}

int run_mu(const Options& o) {
  Config c(o);
  char* json = nullptr;
  if (ocm_status s = ocm_cmd_mu(c.get(), o.direction[0], o.direction[1], &json); s != OCM_OK) return report(s);
  if (!emit(take(json), o.out)) {
    std::cerr << "error: cannot write " << o.out << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

int run_render(const Options& o) {
  std::string out = o.out;
  if (out.empty()) {
    const auto dot = o.csv.find_last_of('.');
    out = (dot == std::string::npos ? o.csv : o.csv.substr(0, dot)) + ".ppm";
  }
  const std::int32_t mx = o.render_box.size() == 2 ? o.render_box[0] : -1;
  const std::int32_t my = o.render_box.size() == 2 ? o.render_box[1] : -1;
  return report(ocm_cmd_render(o.csv.c_str(), out.c_str(), o.kind.empty() ? nullptr : o.kind.c_str(), mx, my));
}

int run_events(const Options& o) {
  Config c(o);
  return report(ocm_cmd_events(c.get(), (o.out.empty() ? std::string("events.csv") : o.out).c_str()));
}

int run_trace(const Options& o) {
  Config c(o);
  return report(ocm_cmd_trace(c.get(), o.site[0], o.site[1], o.time,
                              (o.out.empty() ? std::string("trace.csv") : o.out).c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oriented competition model simulator"};
  app.set_version_flag("--version", std::string(ocm_version()));
  app.require_subcommand(1);

  Options o;

  auto* simulate = app.add_subcommand("simulate", "coupled forward run with snapshots");
  add_common(simulate, o);
  add_model(simulate, o);
  simulate->add_option("--checkpoints", o.checkpoints, "checkpoint times")->delimiter(',');
  simulate->add_option("--out", o.out, "output directory");
  simulate->add_flag("--ppm", o.ppm, "also write PPM renders");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", o.suite, "coupling, dual, shape, halfcolor, lemma1, sectors or all")->required();
  add_common(verify, o);
  add_model(verify, o);
  verify->add_option("--checkpoints", o.checkpoints, "checkpoint times")->delimiter(',');
  verify->add_option("--replicates", o.replicates, "replicate count");
  verify->add_option("--samples", o.samples, "sample count");
  verify->add_option("--trials", o.trials, "walk trials");
  verify->add_option("--n", o.n, "passage-time scale");
  verify->add_option("--k-max", o.k_max, "walk length");
  verify->add_option("--walk-runs", o.walk_runs, "independent walks");
  verify->add_option("--alpha", o.alpha, "alpha in (1/2, 1)");
  verify->add_option("--delta", o.delta, "margin in (0, 1)");
  verify->add_option("--eps", o.eps, "cone half-angle in (0, pi/4)");
  verify->add_option("--rho", o.rho, "minimum arc measure");
  verify->add_option("--angles", o.angles, "profile angles");
  verify->add_option("--out", o.out, "JSON output file (default stdout)");

  auto* shape = app.add_subcommand("shape", "radial profile and curvature");
  add_common(shape, o);
  add_model(shape, o);
  shape->add_option("--replicates", o.replicates, "replicate count");
  shape->add_option("--angles", o.angles, "profile angles");
  shape->add_option("--eps", o.eps, "cone half-angle in (0, pi/4)");
  shape->add_option("--n", o.n, "passage-time scale for --from-mu");
  shape->add_flag("--from-mu", o.from_mu, "estimate the shape from passage times");
  shape->add_option("--out", o.out, "output directory");

  auto* walk = app.add_subcommand("walk", "two-step diagonal walk statistics");
  add_common(walk, o);
  walk->add_option("--trials", o.trials, "greedy trials");
  walk->add_option("--k-max", o.k_max, "walk length");
  walk->add_option("--walk-runs", o.walk_runs, "independent walks");
  walk->add_option("--out", o.out, "output directory");

  auto* render = app.add_subcommand("render", "render a snapshot CSV as PPM");
  render->add_option("csv", o.csv, "snapshot CSV")->required()->check(CLI::ExistingFile);
  render->add_option("--kind", o.kind, "model of the snapshot");
  render->add_option("--box", o.render_box, "box max_x max_y")->expected(2);
  render->add_option("--out", o.out, "PPM output file");

  auto* mu = app.add_subcommand("mu", "passage-time constant estimate");
  add_common(mu, o);
  mu->add_option("--direction", o.direction, "direction dx dy")->expected(2);
  mu->add_option("--n", o.n, "scale");
  mu->add_option("--replicates", o.replicates, "replicate count");
  mu->add_option("--out", o.out, "JSON output file (default stdout)");

  auto* events = app.add_subcommand("events", "list arrow events of a window");
  add_common(events, o);
  events->add_option("--out", o.out, "CSV output file");

  auto* trace = app.add_subcommand("trace", "voter path from a space-time point");
  add_common(trace, o);
  trace->add_option("--site", o.site, "site x y")->expected(2)->required();
  trace->add_option("--time", o.time, "query time")->required();
  trace->add_option("--out", o.out, "CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(o);
    if (*verify) return run_verify(o);
    if (*shape) return run_shape(o);
    if (*walk) return run_walk(o);
    if (*render) return run_render(o);
    if (*mu) return run_mu(o);
    if (*events) return run_events(o);
    if (*trace) return run_trace(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitConfig;
}
