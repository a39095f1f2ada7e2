#include "synthscene/camera_projection.hpp"

#include <algorithm>
#include <cmath>

namespace synth {

std::array<Vec3, 8> cuboid_vertices(const CuboidShape& shape) {
  const double hx = 0.5 * shape.size.x;
  const double hy = 0.5 * shape.size.y;
  const double hz = 0.5 * shape.size.z;
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 corner{(i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? hz : -hz};
    out[i] = shape.offset.apply(corner);
  }
  return out;
}

std::array<std::array<int, 2>, 12> cuboid_edges() {
  std::array<std::array<int, 2>, 12> edges{};
  int n = 0;
  for (int i = 0; i < 8; ++i) {
    for (int bit = 0; bit < 3; ++bit) {
      const int j = i | (1 << bit);
      if (j != i) edges[n++] = {i, j};
    }
  }
  return edges;
}

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Transform& tf) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(tf.apply(p));
  return out;
}

std::optional<Vec2> project_point(const CameraModel& cam, const Vec3& p_cam) {
  if (p_cam.z < cam.near_plane) return std::nullopt;
  return Vec2{cam.fx * p_cam.x / p_cam.z + cam.cx, cam.fy * p_cam.y / p_cam.z + cam.cy};
}

std::optional<PixelRect> project_cuboid_to_rect(const CameraModel& cam, const CuboidShape& shape,
                                                const Transform& object_pose_in_camera) {
  const std::array<Vec3, 8> local = cuboid_vertices(shape);
  std::array<Vec3, 8> in_cam;
  for (int i = 0; i < 8; ++i) in_cam[i] = object_pose_in_camera.apply(local[i]);

  // Surviving endpoints plus edge/near-plane intersections bound the
  // projection of the whole clipped solid.
  std::vector<Vec3> points;
  points.reserve(16);
  for (int i = 0; i < 8; ++i) {
    if (in_cam[i].z >= cam.near_plane) points.push_back(in_cam[i]);
  }
  for (const auto& edge : cuboid_edges()) {
    const Vec3& a = in_cam[edge[0]];
    const Vec3& b = in_cam[edge[1]];
    const bool a_front = a.z >= cam.near_plane;
    const bool b_front = b.z >= cam.near_plane;
    if (a_front == b_front) continue;
    const double u = (cam.near_plane - a.z) / (b.z - a.z);
    points.push_back({a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, cam.near_plane});
  }
  if (points.empty()) return std::nullopt;

  PixelRect rect{1e300, 1e300, -1e300, -1e300};
  for (const Vec3& p : points) {
    const Vec2 px = *project_point(cam, p);
    rect.x_min = std::min(rect.x_min, px.x);
    rect.y_min = std::min(rect.y_min, px.y);
    rect.x_max = std::max(rect.x_max, px.x);
    rect.y_max = std::max(rect.y_max, px.y);
  }

  rect.x_min = std::max(rect.x_min, 0.0);
  rect.y_min = std::max(rect.y_min, 0.0);
  rect.x_max = std::min(rect.x_max, static_cast<double>(cam.width));
  rect.y_max = std::min(rect.y_max, static_cast<double>(cam.height));
  if (rect.x_min > rect.x_max || rect.y_min > rect.y_max) return std::nullopt;
  return rect;
}

DarknetBox darknet_normalize(const PixelRect& rect, int class_id, int image_width,
                             int image_height) {
  DarknetBox box;
  box.class_id = class_id;
  box.cx_frac = rect.center_x() / image_width;
  box.cy_frac = rect.center_y() / image_height;
  box.w_frac = rect.width() / image_width;
  box.h_frac = rect.height() / image_height;
  return box;
}

}  // namespace synth
