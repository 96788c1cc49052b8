#include "ocm/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ocm/error.hpp"
#include "ocm/format.hpp"

namespace ocm {

namespace {

void dump_into(std::string& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : "null";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_into(out, item, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        dump_into(out, item, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

std::int32_t parse_coordinate(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return static_cast<std::int32_t>(v);
  } catch (const std::exception&) {
    fail(ErrorCode::Parse, "line " + std::to_string(line) + ": bad coordinate '" + text + "'");
  }
}

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  dump_into(out, value, 0);
  out += '\n';
  return out;
}

void write_snapshot_csv(std::ostream& out, const LatticeState& state) {
  out << "x,y,state\n";
  for (const Cell& c : state.cells()) out << c.site.x << ',' << c.site.y << ',' << state_token(state.kind(), c.state) << '\n';
}

LatticeState read_snapshot_csv(std::istream& in, ModelKind kind, const Box& box, double time) {
  LatticeState state(kind, box, time);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && trim(line) == "x,y,state", ErrorCode::Parse,
          "snapshot CSV must start with the header x,y,state");
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string x, y, token;
    require(std::getline(row, x, ',') && std::getline(row, y, ',') && std::getline(row, token), ErrorCode::Parse,
            "line " + std::to_string(number) + ": expected x,y,state");
    const Site s{parse_coordinate(x, number), parse_coordinate(y, number)};
    CellState st;
    try {
      st = parse_state_token(kind, token);
    } catch (const Error& e) {
      fail(ErrorCode::Parse, "line " + std::to_string(number) + ": " + e.what());
    }
    require(box.contains(s), ErrorCode::Parse, "line " + std::to_string(number) + ": site outside the box");
    state.set(s, st);
  }
  return state;
}

std::string snapshot_file_name(ModelKind kind, std::size_t checkpoint, std::string_view extension) {
  return "snapshot_" + std::string(to_string(kind)) + "_" + std::to_string(checkpoint) + "." + std::string(extension);
}

Json manifest_json(const SnapshotSeries& series) {
  Json j;
  j["format"] = "ocm-run/1";
  j["seed"] = series.seed;
  j["kinds"] = Json::array();
  for (ModelKind k : series.kinds) j["kinds"].push_back(std::string(to_string(k)));
  j["t_max"] = series.t_max;
  j["box"] = Json{{"max_x", series.box.max_x}, {"max_y", series.box.max_y}};
  j["checkpoints"] = Json::array();
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
    Json cp;
    cp["index"] = i;
    cp["time"] = series.checkpoints[i].time;
    Json files;
    for (ModelKind k : series.kinds) files[std::string(to_string(k))] = snapshot_file_name(k, i, "csv");
    cp["files"] = files;
    j["checkpoints"].push_back(cp);
  }
  j["truncation_flag"] = series.truncated;
  return j;
}

Manifest parse_manifest(const Json& j) {
  try {
    Manifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& k : j.at("kinds")) m.kinds.push_back(parse_model_kind(k.get<std::string>()));
    m.t_max = j.at("t_max").get<double>();
    m.box = Box{j.at("box").at("max_x").get<std::int32_t>(), j.at("box").at("max_y").get<std::int32_t>()};
    for (const auto& cp : j.at("checkpoints")) m.checkpoints.push_back(cp.at("time").get<double>());
    m.truncated = j.at("truncation_flag").get<bool>();
    return m;
  } catch (const Json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed manifest: ") + e.what());
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_manifest(Json::parse(text));
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

std::vector<std::filesystem::path> write_series(const std::filesystem::path& dir, const SnapshotSeries& series,
                                                bool ppm) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::Io, "cannot create output directory " + dir.string());
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
    for (std::size_t m = 0; m < series.kinds.size(); ++m) {
      const LatticeState& st = series.checkpoints[i].states[m];
      std::ostringstream csv;
      write_snapshot_csv(csv, st);
      written.push_back(dir / snapshot_file_name(series.kinds[m], i, "csv"));
      write_text_file(written.back(), csv.str());
      if (ppm) {
        std::ostringstream img;
        write_ppm(img, st);
        written.push_back(dir / snapshot_file_name(series.kinds[m], i, "ppm"));
        write_text_file(written.back(), img.str());
      }
    }
  }
  written.push_back(dir / "manifest.json");
  write_text_file(written.back(), dump_json(manifest_json(series)));
  return written;
}

SnapshotSeries read_series(const std::filesystem::path& dir) {
  const Manifest m = read_manifest(dir / "manifest.json");
  SnapshotSeries s;
  s.seed = m.seed;
  s.kinds = m.kinds;
  s.box = m.box;
  s.t_max = m.t_max;
  s.truncated = m.truncated;
  for (std::size_t i = 0; i < m.checkpoints.size(); ++i) {
    Checkpoint cp{m.checkpoints[i], {}};
    for (ModelKind k : m.kinds) {
      std::istringstream in(read_text_file(dir / snapshot_file_name(k, i, "csv")));
      cp.states.push_back(read_snapshot_csv(in, k, m.box, m.checkpoints[i]));
    }
    s.checkpoints.push_back(std::move(cp));
  }
  return s;
}

Rgb state_color(CellState state) {
  switch (state) {
    case CellState::Red:
      return {220, 40, 40};
    case CellState::Blue:
      return {40, 60, 220};
    case CellState::Black:
      return {0, 0, 0};
    case CellState::White:
      return {255, 255, 255};
    case CellState::Vacant:
      return {245, 245, 245};
  }
  return {245, 245, 245};
}

void write_ppm(std::ostream& out, const LatticeState& state) {
  const DenseGrid grid = state.dense();
  const Box& box = grid.box;
  out << "P6\n" << (box.max_x + 1) << ' ' << (box.max_y + 1) << "\n255\n";
  std::string row(static_cast<std::size_t>(box.max_x + 1) * 3, '\0');
  for (std::int32_t y = box.max_y; y >= 0; --y) {
    for (std::int32_t x = 0; x <= box.max_x; ++x) {
      const Rgb c = state_color(grid.at(Site{x, y}));
      const auto i = static_cast<std::size_t>(x) * 3;
      row[i] = static_cast<char>(c.r);
      row[i + 1] = static_cast<char>(c.g);
      row[i + 2] = static_cast<char>(c.b);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  require(static_cast<bool>(out), ErrorCode::Io, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace ocm
