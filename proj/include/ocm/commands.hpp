#pragma once

// Batch commands behind the C API and the command-line tool. Every command is
// a pure function of its RunConfig: replicate i of a command uses seed
// `seed + i`, and results are collected per index before anything is written,
// so the output does not depend on the worker count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "ocm/io.hpp"
#include "ocm/models.hpp"

namespace ocm {

struct RunConfig {
  std::uint64_t seed = 0;
  std::vector<ModelKind> models;  // empty: command default
  std::optional<double> t_max;    // empty: command default
  std::vector<double> checkpoints;
  std::optional<std::int32_t> box_side;
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
  std::filesystem::path out_dir = ".";
  bool ppm = false;
  bool shape_from_mu = false;

  /// Throws InvalidArgument when a parameter is out of its documented range.
  void validate() const;
  BoxPolicy box_policy() const { return BoxPolicy{box_side}; }
};

inline constexpr std::string_view kSuiteNames[] = {"coupling", "dual", "shape", "halfcolor", "lemma1", "sectors", "all"};

struct SimulateOutcome {
  SnapshotSeries series;
  std::vector<std::filesystem::path> files;
};

/// Coupled run of config.models (default competition) to t_max (default 50).
SimulateOutcome cmd_simulate(const RunConfig& config);

struct VerifyOutcome {
  Json report;
  bool hard_failure = false;
};

/// Runs one suite, or all of them. Throws UnknownSuite for other names.
VerifyOutcome cmd_verify(const RunConfig& config, std::string_view suite);

/// Radial profile CSV, shape JSON and curvature JSON in config.out_dir.
std::vector<std::filesystem::path> cmd_shape(const RunConfig& config);

/// Walk CSV (one run of k_max steps) and summary JSON in config.out_dir.
std::vector<std::filesystem::path> cmd_walk(const RunConfig& config);

/// PPM of a snapshot CSV. Kind and box default to the manifest.json next to the CSV.
void cmd_render(const std::filesystem::path& csv, const std::filesystem::path& out, std::optional<ModelKind> kind,
                std::optional<Box> box);

/// mu estimate in `direction` as JSON.
Json cmd_mu(const RunConfig& config, Point direction);

/// Arrow events of the window [0, side]^2 x [0, t_max] as CSV.
void cmd_events(const RunConfig& config, const std::filesystem::path& out);

/// Voter path from (z, t) as CSV.
void cmd_trace(const RunConfig& config, Site z, double t, const std::filesystem::path& out);

}  // namespace ocm
