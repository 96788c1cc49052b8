#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "ocm/error.hpp"
#include "ocm/format.hpp"
#include "ocm/io.hpp"

using namespace ocm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ocm_io_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("real formatting round trips with 17 digits") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(-2.5) == "-2.5");
    for (double v : {0.1, 1.0 / 3.0, 123456.789, 1e-300, 6.02e23}) CHECK(std::stod(format_real(v)) == v);
  }

  TEST_CASE("JSON writer layout") {
    Json j;
    j["b"] = 1;
    j["a"] = 0.1;
    j["n"] = std::numeric_limits<double>::quiet_NaN();
    j["list"] = Json::array({1, 2});
    j["empty"] = Json::array();
    j["s"] = "x\"y";
    CHECK(dump_json(j) ==
          "{\n  \"b\": 1,\n  \"a\": 0.10000000000000001,\n  \"n\": null,\n  \"list\": [\n    1,\n    2\n  ],\n"
          "  \"empty\": [],\n  \"s\": \"x\\\"y\"\n}\n");
  }

  TEST_CASE("snapshot CSV round trip for every model") {
    for (ModelKind k : kAllModelKinds) {
      const auto series = run(3, k, 8.0, std::vector<double>{8.0}, BoxPolicy{20});
      const LatticeState& s = series.checkpoints[0].states[0];
      std::stringstream buf;
      write_snapshot_csv(buf, s);
      CHECK(buf.str().rfind("x,y,state\n", 0) == 0);
      const LatticeState back = read_snapshot_csv(buf, k, s.box(), s.time());
      CHECK(back == s);
    }
  }

  TEST_CASE("Richardson rows use the occupied token") {
    std::ostringstream out;
    write_snapshot_csv(out, init_default(ModelKind::Richardson, Box::square(3)));
    CHECK(out.str() == "x,y,state\n0,1,occupied\n1,0,occupied\n");
  }

  TEST_CASE("malformed snapshot CSV is a parse error") {
    const auto expect_parse = [](const std::string& text) {
      std::istringstream in(text);
      try {
        read_snapshot_csv(in, ModelKind::Competition, Box::square(5), 0.0);
        FAIL("expected a parse error for: " << text);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
      }
    };
    expect_parse("");
    expect_parse("a,b,c\n");
    expect_parse("x,y,state\n1,2\n");
    expect_parse("x,y,state\n1,q,red\n");
    expect_parse("x,y,state\n1,1,green\n");
    expect_parse("x,y,state\n9,1,red\n");
  }

  TEST_CASE("file names") {
    CHECK(snapshot_file_name(ModelKind::HostileGrowth, 2, "csv") == "snapshot_hostile-growth_2.csv");
  }

  TEST_CASE("manifest round trip") {
    const auto series = coupled_run(9, kAllModelKinds, 6.0, std::vector<double>{3.0, 6.0});
    const Json j = manifest_json(series);
    CHECK(j["format"] == "ocm-run/1");
    const Manifest m = parse_manifest(Json::parse(dump_json(j)));
    CHECK(m.seed == 9);
    CHECK(m.kinds == series.kinds);
    CHECK(m.t_max == 6.0);
    CHECK(m.box == series.box);
    CHECK(m.checkpoints == std::vector<double>{3.0, 6.0});
    CHECK_FALSE(m.truncated);
  }

  TEST_CASE("bad manifests are rejected") {
    CHECK_THROWS_AS(parse_manifest(Json::parse(R"({"format":"other"})")), Error);
    CHECK_THROWS_AS(parse_manifest(Json::parse(R"({"format":"ocm-run/1"})")), Error);
  }

  TEST_CASE("series directory round trip") {
    const fs::path dir = scratch("series");
    const auto series = coupled_run(4, kAllModelKinds, 10.0, std::vector<double>{5.0, 10.0});
    const auto files = write_series(dir, series, true);
    CHECK(files.size() == 1 + 2 * 4 * 2);
    for (const auto& f : files) CHECK(fs::exists(f));
    const SnapshotSeries back = read_series(dir);
    CHECK(back.seed == series.seed);
    CHECK(back.kinds == series.kinds);
    REQUIRE(back.checkpoints.size() == 2);
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t k = 0; k < 4; ++k) CHECK(back.checkpoints[c].states[k] == series.checkpoints[c].states[k]);
    fs::remove_all(dir);
  }

  TEST_CASE("PPM raster has the box size and bottom-left origin") {
    LatticeState s(ModelKind::Competition, Box{2, 1});
    s.set({1, 0}, CellState::Red);
    s.set({0, 1}, CellState::Blue);
    std::ostringstream out;
    write_ppm(out, s);
    const std::string p = out.str();
    const std::string header = "P6\n3 2\n255\n";
    REQUIRE(p.size() == header.size() + 3 * 6);
    CHECK(p.substr(0, header.size()) == header);
    const auto pixel = [&](int row, int col) {
      const std::size_t o = header.size() + 3 * static_cast<std::size_t>(row * 3 + col);
      return Rgb{static_cast<unsigned char>(p[o]), static_cast<unsigned char>(p[o + 1]),
                 static_cast<unsigned char>(p[o + 2])};
    };
    // Top row is y = 1.
    CHECK(pixel(0, 0).b == 220);
    CHECK(pixel(1, 1).r == 220);
    CHECK(pixel(1, 0).r == 245);
  }

  TEST_CASE("empty snapshot renders as background") {
    std::ostringstream out;
    write_ppm(out, LatticeState(ModelKind::Richardson, Box{4, 2}));
    const std::string p = out.str();
    const std::string header = "P6\n5 3\n255\n";
    REQUIRE(p.size() == header.size() + 45);
    for (std::size_t i = header.size(); i < p.size(); ++i) CHECK(static_cast<unsigned char>(p[i]) == 245);
  }

  TEST_CASE("state colors") {
    CHECK(state_color(CellState::Red).r == 220);
    CHECK(state_color(CellState::Blue).b == 220);
    CHECK(state_color(CellState::Black).g == 0);
    CHECK(state_color(CellState::White).g == 255);
    CHECK(state_color(CellState::Vacant).g == 245);
  }

  TEST_CASE("missing files raise IO errors") {
    try {
      read_text_file("/nonexistent/ocm/file.csv");
      FAIL("expected an IO error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
    }
  }
}
