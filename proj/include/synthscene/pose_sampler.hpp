#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthscene/occupancy_map.hpp"
#include "synthscene/random.hpp"

namespace synth {

class SamplerError : public std::runtime_error {
 public:
  enum class Code { NoFreePose };

  SamplerError(Code code, const std::string& msg, int attempts)
      : std::runtime_error(msg), code_(code), attempts_(attempts) {}
  Code code() const { return code_; }
  int attempts() const { return attempts_; }

 private:
  Code code_;
  int attempts_;
};

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // in (-pi, pi]
};

struct FootprintSpec {
  double safety_radius = 0.0;  // meters, > 0
};

// Owns the RNG stream; every position draw counts as one attempt, matching
// the bounded rejection loop.
struct SamplerState {
  explicit SamplerState(std::uint64_t seed = 0, int max_attempts_in = 1000)
      : rng_seed(seed), max_attempts(max_attempts_in), rng(seed) {}

  std::uint64_t rng_seed;
  int max_attempts;
  Xoshiro256pp rng;
};

// All-octant integer Bresenham. Starts at a, ends at b, 8-connected steps.
// Cell sets are direction-symmetric: the trace always runs from the
// lexicographically smaller endpoint internally.
std::vector<Cell> bresenham_line(Cell a, Cell b);

// Midpoint-circle perimeter, deduplicated, 8-fold symmetric about the center.
// radius 0 yields just the center.
std::vector<Cell> bresenham_circle(Cell center, int radius);

int radius_in_cells(const FootprintSpec& footprint, double resolution);

// Perimeter + radial-line check, then a filled-disc verification so that no
// interior cell can slip through between radial lines.
bool footprint_is_free(const GridMap& map, Cell center, int radius_cells);

// Uniform free-cell rejection sampling with a uniform orientation in
// (-pi, pi]. Throws NoFreePose after max_attempts rejected draws.
Pose2D sample_pose(const GridMap& map, const FootprintSpec& footprint, SamplerState& state);

}  // namespace synth
