#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthscene/camera_projection.hpp"
#include "synthscene/geometry.hpp"

namespace synth {

class RenderError : public std::runtime_error {
 public:
  enum class Code { DimensionMismatch };

  RenderError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major triples, 3 * width * height
};

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1

  bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::uint64_t count_set() const;
};

// Per-pixel index of the nearest object surface, -1 where only background is
// visible. Exact oracle for visible-pixel masks.
struct IdBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> ids;

  std::int32_t at(int x, int y) const { return ids[static_cast<std::size_t>(y) * width + x]; }
};

struct RenderObject {
  CuboidShape shape;
  Transform world_pose;
  int class_id = 0;
  bool visible = true;
};

struct RenderOptions {
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

// Per-pixel luminance statistics of the empty scene.
struct BackgroundModel {
  int width = 0;
  int height = 0;
  std::vector<double> mean;
  std::vector<double> variance;  // population variance
  int trained_frames = 0;
};

struct SubtractorParams {
  double k = 9.0;     // variance multiplier (~3 sigma)
  double tau = 225.0;  // luminance floor, squared
};

// Instrumentation for the segmentation-skip contract.
struct RenderCounters {
  std::uint64_t train_calls = 0;
  std::uint64_t subtract_calls = 0;
};

struct SceneSnapshot {
  double time = 0.0;
  std::vector<RenderObject> objects;
  CameraModel camera;
  Frame frame;
  std::vector<Mask> masks;  // one per object iff segmentation was requested
  std::vector<std::vector<std::optional<Vec2>>> projected_vertices;
  std::vector<std::vector<std::optional<Vec2>>> projected_keypoints;
};

double luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

// Fixed chromatic palette, cycled by class id. Colors are chosen to stay
// separated from the checkerboard grays under any shading level.
Rgb class_color(int class_id);

// Z-buffered flat-shaded cuboid rasterization over a fixed checkerboard,
// optional seeded additive Gaussian noise. Bitwise deterministic for a given
// input and seed.
Frame render_scene(std::span<const RenderObject> objects, const CameraModel& cam,
                   const RenderOptions& options = {});

// Same rasterization path as render_scene, recording object indices instead
// of colors; no shading, no noise.
IdBuffer render_id_buffer(std::span<const RenderObject> objects, const CameraModel& cam);

BackgroundModel train_background(std::span<const Frame> frames,
                                 RenderCounters* counters = nullptr);

// Foreground where (lum - mean)^2 > k * variance + tau.
Mask subtract(const BackgroundModel& model, const Frame& frame,
              const SubtractorParams& params = {}, RenderCounters* counters = nullptr);

// Keeps only bits whose pixel center lies inside the rectangle.
Mask filter_mask_with_bbox(const Mask& mask, const PixelRect& rect);

// One-object-at-a-time protocol: render each object solo (others hidden),
// subtract against the trained background, then filter with the object's
// projected-cuboid rectangle. Solo silhouettes are amodal: occluders are out
// of the scene, so occluded parts are included.
std::vector<Mask> isolated_object_masks(std::span<const RenderObject> objects,
                                        const CameraModel& cam, const BackgroundModel& model,
                                        const SubtractorParams& params,
                                        const RenderOptions& options = {},
                                        RenderCounters* counters = nullptr);

// Non-canonical alternative: per-object visible-region masks taken from the
// depth-ordered id buffer of the full scene. Occluded parts are excluded and
// the subtractor is never involved.
std::vector<Mask> visibility_object_masks(std::span<const RenderObject> objects,
                                          const CameraModel& cam);

}  // namespace synth
