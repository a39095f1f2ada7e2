#include "synthscene/occupancy_map.hpp"

#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

using namespace synth;

namespace {

PgmImage parse_string(const std::string& bytes) {
  std::istringstream in(bytes);
  return parse_pgm(in);
}

GridMap uniform_map(int w, int h, Occupancy occ, double resolution = 1.0,
                    MapOrigin origin = {}) {
  GridMap map;
  map.width_cells = w;
  map.height_cells = h;
  map.resolution = resolution;
  map.origin = origin;
  map.cells.assign(static_cast<std::size_t>(w) * h, occ);
  return map;
}

}  // namespace

TEST_SUITE("occupancy_map") {

TEST_CASE("parse_pgm smallest binary P5") {
  const std::string bytes = std::string("P5\n2 1\n255\n") + '\x00' + '\xff';
  const PgmImage img = parse_string(bytes);
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  REQUIRE(img.pixels.size() == 2);
  CHECK(img.pixels[0] == 0);
  CHECK(img.pixels[1] == 255);
}

TEST_CASE("parse_pgm ASCII P2 with comment") {
  const PgmImage img = parse_string("P2\n# c\n1 1\n255\n128\n");
  CHECK(img.width == 1);
  CHECK(img.height == 1);
  REQUIRE(img.pixels.size() == 1);
  CHECK(img.pixels[0] == 128);
}

TEST_CASE("parse_pgm round-trips a random raster through the reference codec") {
  std::mt19937 rng(1234);
  std::vector<std::uint8_t> raster(64 * 64);
  for (auto& px : raster) px = static_cast<std::uint8_t>(rng() % 256);

  const std::string p5 = oracle::encode_p5(64, 64, raster);
  int w = 0, h = 0;
  CHECK(oracle::decode_p5(p5, w, h) == raster);  // codec is self-consistent
  CHECK(w == 64);
  CHECK(h == 64);

  const PgmImage from_p5 = parse_string(p5);
  CHECK(from_p5.width == 64);
  CHECK(from_p5.height == 64);
  CHECK(from_p5.pixels == raster);

  const PgmImage from_p2 = parse_string(oracle::encode_p2(64, 64, raster));
  CHECK(from_p2.pixels == raster);
}

TEST_CASE("parse_pgm typed errors") {
  auto code_of = [](const std::string& bytes) {
    try {
      parse_string(bytes);
    } catch (const MapError& e) {
      return e.code();
    }
    FAIL("expected MapError");
    return MapError::Code::MalformedHeader;
  };

  CHECK(code_of("P7\n1 1\n255\nx") == MapError::Code::MalformedHeader);
  CHECK(code_of("P5\n0 4\n255\n") == MapError::Code::MalformedHeader);
  CHECK(code_of("P5\n2 2\n65535\n") == MapError::Code::UnsupportedMaxval);
  CHECK(code_of(std::string("P5\n2 2\n255\n") + "ab") == MapError::Code::TruncatedData);
  CHECK(code_of("P2\n2 2\n255\n10 20 30\n") == MapError::Code::TruncatedData);
  CHECK(code_of("P2\n1 1\n100\n101\n") == MapError::Code::TruncatedData);  // above maxval
}

TEST_CASE("load_map applies the map-server value interpretation") {
  MapMetadata meta;  // defaults: thresholds 0.196 / 0.65, negate false
  PgmImage img;
  img.width = 3;
  img.height = 1;
  img.pixels = {255, 0, 128};
  const GridMap map = load_map(meta, img);
  CHECK(map.at({0, 0}) == Occupancy::Free);      // white: p = 0
  CHECK(map.at({1, 0}) == Occupancy::Occupied);  // black: p = 1
  CHECK(map.at({2, 0}) == Occupancy::Unknown);   // p ~ 0.498 between thresholds

  MapMetadata negated = meta;
  negated.negate = true;
  const GridMap neg = load_map(negated, img);
  CHECK(neg.at({0, 0}) == Occupancy::Occupied);
  CHECK(neg.at({1, 0}) == Occupancy::Free);
}

TEST_CASE("load_map threshold trichotomy over every gray value") {
  MapMetadata meta;
  for (int gray = 0; gray <= 255; ++gray) {
    PgmImage img;
    img.width = 1;
    img.height = 1;
    img.pixels = {static_cast<std::uint8_t>(gray)};
    const Occupancy occ = load_map(meta, img).at({0, 0});
    const double p = (255.0 - gray) / 255.0;
    Occupancy expected = Occupancy::Unknown;
    if (p >= meta.occupied_thresh) expected = Occupancy::Occupied;
    else if (p <= meta.free_thresh) expected = Occupancy::Free;
    CHECK(occ == expected);
  }
}

TEST_CASE("load_map rejects inverted thresholds") {
  MapMetadata meta;
  meta.free_thresh = 0.7;
  meta.occupied_thresh = 0.65;
  PgmImage img;
  img.width = 1;
  img.height = 1;
  img.pixels = {0};
  CHECK_THROWS_AS(load_map(meta, img), MapError);
}

TEST_CASE("load_map puts raster row 0 at the highest-y cell row") {
  MapMetadata meta;
  PgmImage img;
  img.width = 1;
  img.height = 2;
  img.pixels = {0, 255};  // top row occupied, bottom row free
  const GridMap map = load_map(meta, img);
  CHECK(map.at({0, 1}) == Occupancy::Occupied);
  CHECK(map.at({0, 0}) == Occupancy::Free);
}

TEST_CASE("is_free is total and matches direct lookup") {
  const GridMap tiny = uniform_map(1, 1, Occupancy::Free);
  CHECK(is_free(tiny, {0, 0}));
  CHECK_FALSE(is_free(tiny, {1, 0}));
  CHECK_FALSE(is_free(tiny, {0, -1}));

  std::mt19937 rng(77);
  GridMap map = uniform_map(32, 32, Occupancy::Free);
  for (auto& cell : map.cells) {
    cell = static_cast<Occupancy>(rng() % 3);
  }
  for (int row = 0; row < 32; ++row) {
    for (int col = 0; col < 32; ++col) {
      CHECK(is_free(map, {col, row}) ==
            (map.cells[static_cast<std::size_t>(row) * 32 + col] == Occupancy::Free));
    }
  }
}

TEST_CASE("cell_to_world returns metric cell centers") {
  const GridMap unit = uniform_map(4, 4, Occupancy::Free, 1.0);
  const Vec2 w0 = cell_to_world(unit, {0, 0});
  CHECK(w0.x == doctest::Approx(0.5));
  CHECK(w0.y == doctest::Approx(0.5));

  const GridMap offset = uniform_map(8, 8, Occupancy::Free, 0.5, {10.0, -5.0, 0.0});
  const Vec2 w = cell_to_world(offset, {2, 4});
  CHECK(w.x == doctest::Approx(11.25));
  CHECK(w.y == doctest::Approx(-2.75));
}

TEST_CASE("world_to_cell inverts cell_to_world over a rotated map") {
  const double pi = 3.14159265358979323846;
  const GridMap map = uniform_map(16, 16, Occupancy::Free, 0.25, {3.0, -1.0, pi / 2.0});
  for (int row = 0; row < 16; ++row) {
    for (int col = 0; col < 16; ++col) {
      const auto cell = world_to_cell(map, cell_to_world(map, {col, row}));
      REQUIRE(cell.has_value());
      CHECK(*cell == Cell{col, row});
    }
  }
}

TEST_CASE("world_to_cell round-trip holds for arbitrary origin poses") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  std::uniform_real_distribution<double> angle(-3.14, 3.14);
  for (int trial = 0; trial < 50; ++trial) {
    const GridMap map =
        uniform_map(12, 9, Occupancy::Free, 0.1 + 0.3 * (trial % 5),
                    {coord(rng), coord(rng), angle(rng)});
    for (int row = 0; row < map.height_cells; ++row) {
      for (int col = 0; col < map.width_cells; ++col) {
        const auto cell = world_to_cell(map, cell_to_world(map, {col, row}));
        REQUIRE(cell.has_value());
        CHECK(*cell == Cell{col, row});
      }
    }
  }
}

TEST_CASE("world_to_cell reports out-of-bounds points") {
  const GridMap map = uniform_map(4, 4, Occupancy::Free, 1.0);
  CHECK_FALSE(world_to_cell(map, {-0.5, 1.0}).has_value());
  CHECK_FALSE(world_to_cell(map, {1.0, 4.5}).has_value());
  CHECK(world_to_cell(map, {3.9, 3.9}).has_value());
}

TEST_CASE("is_free_world combines the quantizer with the cell query") {
  GridMap map = uniform_map(4, 4, Occupancy::Free, 0.5);
  map.at({2, 1}) = Occupancy::Occupied;
  CHECK(is_free_world(map, {0.25, 0.25}));
  CHECK_FALSE(is_free_world(map, {1.2, 0.6}));  // inside cell (2, 1)
  CHECK_FALSE(is_free_world(map, {-1.0, 0.0}));
}

TEST_CASE("load_map_metadata reads the JSON sidecar with defaults") {
  oracle::TempDir dir("mapmeta");
  const auto meta_path = dir.path() / "map.json";
  {
    std::ofstream out(meta_path);
    out << R"({"image_path": "map.pgm", "resolution": 0.05, "origin": [1.0, 2.0, 0.5]})";
  }
  const MapMetadata meta = load_map_metadata(meta_path);
  CHECK(meta.resolution == doctest::Approx(0.05));
  CHECK(meta.origin.x == doctest::Approx(1.0));
  CHECK(meta.origin.theta == doctest::Approx(0.5));
  CHECK(meta.occupied_thresh == doctest::Approx(0.65));  // map-server defaults
  CHECK(meta.free_thresh == doctest::Approx(0.196));
  CHECK_FALSE(meta.negate);
  CHECK(std::filesystem::path(meta.image_path).parent_path() == dir.path());

  CHECK_THROWS_AS(load_map_metadata(dir.path() / "missing.json"), MapError);
  {
    std::ofstream out(meta_path);
    out << R"({"resolution": 0.05})";
  }
  CHECK_THROWS_AS(load_map_metadata(meta_path), MapError);
}

}  // TEST_SUITE
