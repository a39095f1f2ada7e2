#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "synthscene/geometry.hpp"

namespace synth {

// Pinhole camera, +z forward / +x right / +y down. pose places the camera in
// the world frame.
struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;
  Transform pose;
  double near_plane = 0.01;  // meters
};

// Circumscribing box in the object frame: corners at (+-L/2, +-W/2, +-H/2)
// moved by `offset` (object origin -> cuboid center).
struct CuboidShape {
  Vec3 size{1.0, 1.0, 1.0};  // length, width, height
  Transform offset;
};

struct PixelRect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }
  bool contains(double u, double v) const {
    return u >= x_min && u <= x_max && v >= y_min && v <= y_max;
  }
};

// Box center and size as fractions of the image dimensions.
struct DarknetBox {
  int class_id = 0;
  double cx_frac = 0.0;
  double cy_frac = 0.0;
  double w_frac = 0.0;
  double h_frac = 0.0;
};

std::array<Vec3, 8> cuboid_vertices(const CuboidShape& shape);

// The 12 cuboid edges as vertex-index pairs into cuboid_vertices() output.
std::array<std::array<int, 2>, 12> cuboid_edges();

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Transform& tf);

// nullopt when the point is behind the near plane.
std::optional<Vec2> project_point(const CameraModel& cam, const Vec3& p_cam);

// Clips cuboid edges against z = near_plane, projects the surviving points
// and clip intersections, and returns their circumscribing rectangle
// intersected with the image bounds. nullopt means not visible.
std::optional<PixelRect> project_cuboid_to_rect(const CameraModel& cam, const CuboidShape& shape,
                                                const Transform& object_pose_in_camera);

DarknetBox darknet_normalize(const PixelRect& rect, int class_id, int image_width,
                             int image_height);

}  // namespace synth
