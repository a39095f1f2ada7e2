#include "synthscene/pose_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace synth {

namespace {

std::vector<Cell> trace_line(Cell a, Cell b) {
  std::vector<Cell> out;
  const int dx = std::abs(b.col - a.col);
  const int dy = -std::abs(b.row - a.row);
  const int sx = a.col < b.col ? 1 : -1;
  const int sy = a.row < b.row ? 1 : -1;
  int err = dx + dy;
  Cell cur = a;
  for (;;) {
    out.push_back(cur);
    if (cur == b) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      cur.col += sx;
    }
    if (e2 <= dx) {
      err += dx;
      cur.row += sy;
    }
  }
  return out;
}

bool lex_less(Cell a, Cell b) { return a.col != b.col ? a.col < b.col : a.row < b.row; }

}  // namespace

std::vector<Cell> bresenham_line(Cell a, Cell b) {
  if (lex_less(b, a)) {
    std::vector<Cell> out = trace_line(b, a);
    std::reverse(out.begin(), out.end());
    return out;
  }
  return trace_line(a, b);
}

std::vector<Cell> bresenham_circle(Cell center, int radius) {
  if (radius <= 0) return {center};

  // First octant: for each row offset y, the column offset x minimizing
  // |x^2 + y^2 - r^2|. |err| is unimodal in x, so a descending scan from the
  // previous minimizer finds it.
  std::vector<Cell> out;
  auto err = [radius](long x, long y) { return std::llabs(x * x + y * y - (long)radius * radius); };
  long x = radius;
  for (long y = 0; y <= x; ++y) {
    while (x > 0 && err(x - 1, y) < err(x, y)) --x;
    if (x < y) break;
    const int ox = static_cast<int>(x);
    const int oy = static_cast<int>(y);
    const int refl[8][2] = {{ox, oy},   {-ox, oy}, {ox, -oy}, {-ox, -oy},
                            {oy, ox},   {-oy, ox}, {oy, -ox}, {-oy, -ox}};
    for (const auto& r : refl) {
      out.push_back({center.col + r[0], center.row + r[1]});
    }
  }
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int radius_in_cells(const FootprintSpec& footprint, double resolution) {
  return static_cast<int>(std::ceil(footprint.safety_radius / resolution));
}

bool footprint_is_free(const GridMap& map, Cell center, int radius_cells) {
  if (!is_free(map, center)) return false;
  const long r2 = static_cast<long>(radius_cells) * radius_cells;
  auto in_disc = [&](Cell c) {
    const long dx = c.col - center.col;
    const long dy = c.row - center.row;
    return dx * dx + dy * dy <= r2;
  };
  // Perimeter + radial lines, restricted to the disc: Bresenham perimeter
  // cells can sit just outside radius r, and the clearance contract is the
  // filled disc, not the rasterized circle.
  for (const Cell& perimeter : bresenham_circle(center, radius_cells)) {
    for (const Cell& cell : bresenham_line(center, perimeter)) {
      if (in_disc(cell) && !is_free(map, cell)) return false;
    }
  }
  // Radial lines can also miss interior cells at some radii; the filled disc
  // is the actual guarantee.
  for (int dy = -radius_cells; dy <= radius_cells; ++dy) {
    for (int dx = -radius_cells; dx <= radius_cells; ++dx) {
      if (static_cast<long>(dx) * dx + static_cast<long>(dy) * dy > r2) continue;
      if (!is_free(map, {center.col + dx, center.row + dy})) return false;
    }
  }
  return true;
}

Pose2D sample_pose(const GridMap& map, const FootprintSpec& footprint, SamplerState& state) {
  const std::uint64_t cell_count =
      static_cast<std::uint64_t>(map.width_cells) * static_cast<std::uint64_t>(map.height_cells);
  const int radius = radius_in_cells(footprint, map.resolution);
  for (int attempt = 1; attempt <= state.max_attempts; ++attempt) {
    const std::uint64_t index = state.rng.uniform_below(cell_count);
    const Cell cell{static_cast<int>(index % map.width_cells),
                    static_cast<int>(index / map.width_cells)};
    if (!is_free(map, cell)) continue;
    if (!footprint_is_free(map, cell, radius)) continue;
    const Vec2 world = cell_to_world(map, cell);
    // theta in (-pi, pi]: u = 0 maps to pi, u -> 1 approaches -pi.
    const double u = state.rng.uniform01();
    const double pi = 3.14159265358979323846;
    return {world.x, world.y, pi - u * 2.0 * pi};
  }
  throw SamplerError(SamplerError::Code::NoFreePose,
                     "no free pose found after " + std::to_string(state.max_attempts) +
                         " attempts (radius " + std::to_string(radius) + " cells)",
                     state.max_attempts);
}

}  // namespace synth
