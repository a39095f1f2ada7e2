#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthscene/geometry.hpp"

namespace synth {

class MapError : public std::runtime_error {
 public:
  enum class Code {
    MalformedHeader,
    TruncatedData,
    UnsupportedMaxval,
    InvalidThresholds,
    UnreadableFile,
  };

  MapError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

enum class Occupancy : std::uint8_t { Free, Occupied, Unknown };

struct Cell {
  int col = 0;
  int row = 0;
  bool operator==(const Cell&) const = default;
};

struct MapOrigin {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Decoded PGM raster, row-major with the top row first.
struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

// Mirrors the map-server YAML fields, carried in a JSON sidecar next to the
// image. Thresholds and negate default to the map-server conventions.
struct MapMetadata {
  std::string image_path;
  double resolution = 0.05;
  MapOrigin origin;
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;
  bool negate = false;
};

// Occupancy raster in metric space. Cell row 0 is the lowest-y row; the
// origin is the pose of cell (0,0)'s corner in the world frame.
struct GridMap {
  int width_cells = 0;
  int height_cells = 0;
  double resolution = 1.0;
  MapOrigin origin;
  std::vector<Occupancy> cells;  // row-major, cells[row * width + col]

  bool in_bounds(Cell c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width_cells && c.row < height_cells;
  }
  Occupancy at(Cell c) const {
    return cells[static_cast<std::size_t>(c.row) * width_cells + c.col];
  }
  Occupancy& at(Cell c) { return cells[static_cast<std::size_t>(c.row) * width_cells + c.col]; }
};

// P5 (binary) and P2 (ASCII), maxval <= 255, '#' comments allowed in the
// header. Returns a complete raster or throws; never a partial one.
PgmImage parse_pgm(std::istream& in);
PgmImage load_pgm_file(const std::filesystem::path& path);

MapMetadata load_map_metadata(const std::filesystem::path& path);

// Map-server value interpretation: p = (255 - gray) / 255 (or gray / 255 when
// negate), Occupied when p >= occupied_thresh, Free when p <= free_thresh,
// Unknown otherwise. Raster row 0 (top) becomes the highest-y cell row.
GridMap load_map(const MapMetadata& meta, const PgmImage& raster);

// Total: out-of-bounds cells are not free. Unknown is not free either.
bool is_free(const GridMap& map, Cell cell);
bool is_free_world(const GridMap& map, const Vec2& point);

// Metric center of the cell under the map origin pose.
Vec2 cell_to_world(const GridMap& map, Cell cell);
// Floor-quantized inverse; nullopt when the point is outside the grid.
std::optional<Cell> world_to_cell(const GridMap& map, const Vec2& point);

}  // namespace synth
