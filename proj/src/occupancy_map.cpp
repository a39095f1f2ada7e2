#include "synthscene/occupancy_map.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace synth {

namespace {

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
// PGM headers allow comments anywhere between tokens.
bool next_header_int(std::istream& in, long& value) {
  for (;;) {
    const int c = in.peek();
    if (c == EOF) return false;
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    break;
  }
  long v = 0;
  bool any = false;
  while (std::isdigit(in.peek())) {
    v = v * 10 + (in.get() - '0');
    any = true;
    if (v > 1'000'000'000L) return false;
  }
  if (!any) return false;
  value = v;
  return true;
}

}  // namespace

PgmImage parse_pgm(std::istream& in) {
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != 'P' || (m1 != '5' && m1 != '2')) {
    throw MapError(MapError::Code::MalformedHeader, "pgm: bad magic, expected P5 or P2");
  }
  const bool binary = (m1 == '5');

  long width = 0, height = 0, maxval = 0;
  if (!next_header_int(in, width) || !next_header_int(in, height) ||
      !next_header_int(in, maxval) || width <= 0 || height <= 0) {
    throw MapError(MapError::Code::MalformedHeader, "pgm: invalid header dimensions");
  }
  if (maxval > 255) {
    throw MapError(MapError::Code::UnsupportedMaxval,
                   "pgm: maxval " + std::to_string(maxval) + " > 255 not supported");
  }
  if (maxval <= 0) {
    throw MapError(MapError::Code::MalformedHeader, "pgm: nonpositive maxval");
  }

  if (width * height > 100'000'000L) {
    throw MapError(MapError::Code::MalformedHeader, "pgm: image dimensions unreasonably large");
  }
  PgmImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  img.pixels.resize(count);

  if (binary) {
    // Exactly one whitespace byte separates the header from the sample data.
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) {
      throw MapError(MapError::Code::MalformedHeader, "pgm: missing separator after maxval");
    }
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
      throw MapError(MapError::Code::TruncatedData,
                     "pgm: expected " + std::to_string(count) + " samples, got " +
                         std::to_string(in.gcount()));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      long v = 0;
      if (!next_header_int(in, v) || v > maxval) {
        throw MapError(MapError::Code::TruncatedData,
                       "pgm: sample " + std::to_string(i) + " missing or out of range");
      }
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

PgmImage load_pgm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MapError(MapError::Code::UnreadableFile, "cannot open " + path.string());
  }
  return parse_pgm(in);
}

MapMetadata load_map_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MapError(MapError::Code::UnreadableFile, "cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MapError(MapError::Code::MalformedHeader,
                   "map metadata " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("image_path") || !j.contains("resolution") ||
      !j.contains("origin")) {
    throw MapError(MapError::Code::MalformedHeader,
                   "map metadata: image_path, resolution and origin are required");
  }
  MapMetadata meta;
  try {
    meta.image_path = j.at("image_path").get<std::string>();
    meta.resolution = j.at("resolution").get<double>();
    const auto& origin = j.at("origin");
    meta.origin = {origin.at(0).get<double>(), origin.at(1).get<double>(),
                   origin.at(2).get<double>()};
    if (j.contains("occupied_thresh")) meta.occupied_thresh = j.at("occupied_thresh").get<double>();
    if (j.contains("free_thresh")) meta.free_thresh = j.at("free_thresh").get<double>();
    if (j.contains("negate")) meta.negate = j.at("negate").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw MapError(MapError::Code::MalformedHeader, std::string("map metadata: ") + e.what());
  }
  if (meta.resolution <= 0.0) {
    throw MapError(MapError::Code::MalformedHeader, "map metadata: resolution must be > 0");
  }
  // Sidecar-relative image path.
  const std::filesystem::path img(meta.image_path);
  if (img.is_relative()) {
    meta.image_path = (path.parent_path() / img).string();
  }
  return meta;
}

GridMap load_map(const MapMetadata& meta, const PgmImage& raster) {
  if (meta.free_thresh >= meta.occupied_thresh || meta.free_thresh < 0.0 ||
      meta.occupied_thresh > 1.0) {
    throw MapError(MapError::Code::InvalidThresholds,
                   "thresholds must satisfy 0 <= free_thresh < occupied_thresh <= 1");
  }
  GridMap map;
  map.width_cells = raster.width;
  map.height_cells = raster.height;
  map.resolution = meta.resolution;
  map.origin = meta.origin;
  map.cells.resize(static_cast<std::size_t>(raster.width) * raster.height);
  for (int img_row = 0; img_row < raster.height; ++img_row) {
    const int cell_row = raster.height - 1 - img_row;  // top image row = highest-y cell row
    for (int col = 0; col < raster.width; ++col) {
      const double gray = raster.pixels[static_cast<std::size_t>(img_row) * raster.width + col];
      const double p = meta.negate ? gray / 255.0 : (255.0 - gray) / 255.0;
      Occupancy occ = Occupancy::Unknown;
      if (p >= meta.occupied_thresh) {
        occ = Occupancy::Occupied;
      } else if (p <= meta.free_thresh) {
        occ = Occupancy::Free;
      }
      map.at({col, cell_row}) = occ;
    }
  }
  return map;
}

bool is_free(const GridMap& map, Cell cell) {
  return map.in_bounds(cell) && map.at(cell) == Occupancy::Free;
}

bool is_free_world(const GridMap& map, const Vec2& point) {
  const auto cell = world_to_cell(map, point);
  return cell.has_value() && is_free(map, *cell);
}

Vec2 cell_to_world(const GridMap& map, Cell cell) {
  const double lx = (cell.col + 0.5) * map.resolution;
  const double ly = (cell.row + 0.5) * map.resolution;
  const double c = std::cos(map.origin.theta);
  const double s = std::sin(map.origin.theta);
  return {map.origin.x + c * lx - s * ly, map.origin.y + s * lx + c * ly};
}

std::optional<Cell> world_to_cell(const GridMap& map, const Vec2& point) {
  const double dx = point.x - map.origin.x;
  const double dy = point.y - map.origin.y;
  const double c = std::cos(map.origin.theta);
  const double s = std::sin(map.origin.theta);
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  const Cell cell{static_cast<int>(std::floor(lx / map.resolution)),
                  static_cast<int>(std::floor(ly / map.resolution))};
  if (!map.in_bounds(cell)) return std::nullopt;
  return cell;
}

}  // namespace synth
