#pragma once

// File formats: snapshot CSV (x,y,state), run manifest JSON, PPM rasters.
// JSON is emitted by a small deterministic writer so that key order and
// number formatting (17 significant digits) are fixed.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocm/models.hpp"

namespace ocm {

using Json = nlohmann::ordered_json;

/// Pretty JSON with 2-space indent; doubles via %.17g, non-finite as null.
std::string dump_json(const Json& value);

/// Header "x,y,state", one row per non-default site in site order.
void write_snapshot_csv(std::ostream& out, const LatticeState& state);
LatticeState read_snapshot_csv(std::istream& in, ModelKind kind, const Box& box, double time);

std::string snapshot_file_name(ModelKind kind, std::size_t checkpoint, std::string_view extension);

Json manifest_json(const SnapshotSeries& series);

struct Manifest {
  std::uint64_t seed = 0;
  std::vector<ModelKind> kinds;
  double t_max = 0.0;
  Box box;
  std::vector<double> checkpoints;
  bool truncated = false;
};
Manifest parse_manifest(const Json& json);
Manifest read_manifest(const std::filesystem::path& path);

/// Writes manifest.json and every snapshot CSV (plus PPMs when asked) into `dir`.
std::vector<std::filesystem::path> write_series(const std::filesystem::path& dir, const SnapshotSeries& series,
                                                bool ppm);

/// Loads a series written by write_series.
SnapshotSeries read_series(const std::filesystem::path& dir);

struct Rgb {
  unsigned char r, g, b;
};
Rgb state_color(CellState state);

/// Binary P6, one pixel per site, origin at the bottom-left.
void write_ppm(std::ostream& out, const LatticeState& state);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ocm
