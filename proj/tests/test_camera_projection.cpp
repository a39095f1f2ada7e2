#include "synthscene/camera_projection.hpp"

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

using namespace synth;

namespace {

CameraModel test_camera() {
  CameraModel cam;
  cam.fx = 100;
  cam.fy = 100;
  cam.cx = 160;
  cam.cy = 120;
  cam.width = 320;
  cam.height = 240;
  cam.near_plane = 0.01;
  return cam;
}

Transform random_transform(std::mt19937& rng) {
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Transform tf;
  tf.translation = {coord(rng), coord(rng), coord(rng)};
  tf.rotation = normalized(Quat{gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
  return tf;
}

std::set<std::array<int, 3>> rounded_set(const std::vector<Vec3>& points) {
  std::set<std::array<int, 3>> out;
  for (const Vec3& p : points) {
    out.insert({static_cast<int>(std::lround(p.x * 1000)),
                static_cast<int>(std::lround(p.y * 1000)),
                static_cast<int>(std::lround(p.z * 1000))});
  }
  return out;
}

// Brute-force rectangle: project all 8 corners (valid only when every corner
// is in front of the near plane), then clamp to the image.
PixelRect corner_projection_rect(const CameraModel& cam, const CuboidShape& shape,
                                 const Transform& pose_in_cam) {
  PixelRect rect{1e300, 1e300, -1e300, -1e300};
  for (const Vec3& v : cuboid_vertices(shape)) {
    const Vec3 p = pose_in_cam.apply(v);
    const double u = cam.fx * p.x / p.z + cam.cx;
    const double w = cam.fy * p.y / p.z + cam.cy;
    rect.x_min = std::min(rect.x_min, u);
    rect.x_max = std::max(rect.x_max, u);
    rect.y_min = std::min(rect.y_min, w);
    rect.y_max = std::max(rect.y_max, w);
  }
  rect.x_min = std::max(rect.x_min, 0.0);
  rect.y_min = std::max(rect.y_min, 0.0);
  rect.x_max = std::min(rect.x_max, static_cast<double>(cam.width));
  rect.y_max = std::min(rect.y_max, static_cast<double>(cam.height));
  return rect;
}

}  // namespace

TEST_SUITE("camera_projection") {

TEST_CASE("cuboid_vertices covers all sign combinations") {
  const CuboidShape unit{{1, 1, 1}, {}};
  const auto verts = cuboid_vertices(unit);
  std::set<std::array<int, 3>> got =
      rounded_set(std::vector<Vec3>(verts.begin(), verts.end()));
  std::set<std::array<int, 3>> want;
  for (const int sx : {-500, 500}) {
    for (const int sy : {-500, 500}) {
      for (const int sz : {-500, 500}) want.insert({sx, sy, sz});
    }
  }
  CHECK(got == want);

  const CuboidShape box{{2, 4, 6}, {}};
  for (const Vec3& v : cuboid_vertices(box)) {
    CHECK(std::abs(v.x) == doctest::Approx(1.0));
    CHECK(std::abs(v.y) == doctest::Approx(2.0));
    CHECK(std::abs(v.z) == doctest::Approx(3.0));
  }
}

TEST_CASE("cuboid offset shifts the corners") {
  CuboidShape shape{{1, 1, 1}, {}};
  shape.offset.translation = {0, 0, 1};
  for (const Vec3& v : cuboid_vertices(shape)) {
    CHECK((v.z == doctest::Approx(0.5) || v.z == doctest::Approx(1.5)));
  }
}

TEST_CASE("transform_points basics") {
  const std::vector<Vec3> points{{0, 0, 0}, {1, 1, 1}};
  const auto same = transform_points(points, {});
  CHECK(same[1].x == doctest::Approx(1.0));

  Transform shift;
  shift.translation = {1, 2, 3};
  const auto moved = transform_points(points, shift);
  CHECK(moved[0].x == doctest::Approx(1.0));
  CHECK(moved[0].y == doctest::Approx(2.0));
  CHECK(moved[0].z == doctest::Approx(3.0));
}

TEST_CASE("transform_points matches the homogeneous-matrix oracle") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Transform tf = random_transform(rng);
    const oracle::Mat4 m = oracle::mat_from_quat_trans(
        tf.rotation.x, tf.rotation.y, tf.rotation.z, tf.rotation.w, tf.translation.x,
        tf.translation.y, tf.translation.z);
    std::vector<Vec3> points;
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    for (int i = 0; i < 8; ++i) points.push_back({coord(rng), coord(rng), coord(rng)});

    const auto got = transform_points(points, tf);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double in[3] = {points[i].x, points[i].y, points[i].z};
      double want[3];
      oracle::apply_mat(m, in, want);
      CHECK(std::abs(got[i].x - want[0]) < 1e-12);
      CHECK(std::abs(got[i].y - want[1]) < 1e-12);
      CHECK(std::abs(got[i].z - want[2]) < 1e-12);
    }
  }
}

TEST_CASE("transform round-trip through the inverse") {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Transform tf = random_transform(rng);
    std::vector<Vec3> points;
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    for (int i = 0; i < 4; ++i) points.push_back({coord(rng), coord(rng), coord(rng)});
    const auto back = transform_points(transform_points(points, tf), inverse(tf));
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(std::abs(back[i].x - points[i].x) < 1e-9);
      CHECK(std::abs(back[i].y - points[i].y) < 1e-9);
      CHECK(std::abs(back[i].z - points[i].z) < 1e-9);
    }
  }
}

TEST_CASE("project_point pinhole formula") {
  const CameraModel cam = test_camera();
  const auto center = project_point(cam, {0, 0, 1});
  REQUIRE(center.has_value());
  CHECK(center->x == doctest::Approx(160.0));
  CHECK(center->y == doctest::Approx(120.0));

  const auto off = project_point(cam, {1, 0, 2});
  REQUIRE(off.has_value());
  CHECK(off->x == doctest::Approx(210.0));
  CHECK(off->y == doctest::Approx(120.0));

  CHECK_FALSE(project_point(cam, {0, 0, 0.001}).has_value());
}

TEST_CASE("projection is linear in x at fixed depth") {
  const CameraModel cam = test_camera();
  for (const double z : {0.5, 2.0, 7.3}) {
    for (const double dx : {0.1, 1.0, -2.5}) {
      const auto a = project_point(cam, {0.4, -0.2, z});
      const auto b = project_point(cam, {0.4 + dx, -0.2, z});
      REQUIRE(a.has_value());
      REQUIRE(b.has_value());
      CHECK(b->x - a->x == doctest::Approx(cam.fx * dx / z).epsilon(1e-12));
      CHECK(b->y - a->y == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("project_cuboid_to_rect matches the project-all-corners oracle") {
  const CameraModel cam = test_camera();
  const CuboidShape unit{{1, 1, 1}, {}};
  Transform pose;
  pose.translation = {0, 0, 5};

  const auto rect = project_cuboid_to_rect(cam, unit, pose);
  REQUIRE(rect.has_value());
  const PixelRect want = corner_projection_rect(cam, unit, pose);
  CHECK(rect->x_min == doctest::Approx(want.x_min).epsilon(1e-12));
  CHECK(rect->x_max == doctest::Approx(want.x_max).epsilon(1e-12));
  CHECK(rect->y_min == doctest::Approx(want.y_min).epsilon(1e-12));
  CHECK(rect->y_max == doctest::Approx(want.y_max).epsilon(1e-12));
  // Widest extent comes from the near face at z = 4.5.
  CHECK(rect->x_min == doctest::Approx(160.0 - 100.0 * 0.5 / 4.5));
  CHECK(rect->x_max == doctest::Approx(160.0 + 100.0 * 0.5 / 4.5));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> lateral(-2.0, 2.0);
  std::uniform_real_distribution<double> depth(4.0, 12.0);
  for (int trial = 0; trial < 100; ++trial) {
    Transform random_pose = random_transform(rng);
    random_pose.translation = {lateral(rng), lateral(rng), depth(rng)};
    const auto r = project_cuboid_to_rect(cam, unit, random_pose);
    REQUIRE(r.has_value());
    const PixelRect w = corner_projection_rect(cam, unit, random_pose);
    CHECK(std::abs(r->x_min - w.x_min) < 1e-9);
    CHECK(std::abs(r->x_max - w.x_max) < 1e-9);
    CHECK(std::abs(r->y_min - w.y_min) < 1e-9);
    CHECK(std::abs(r->y_max - w.y_max) < 1e-9);
  }
}

TEST_CASE("project_cuboid_to_rect handles invisibility and clamping") {
  const CameraModel cam = test_camera();
  const CuboidShape unit{{1, 1, 1}, {}};

  Transform behind;
  behind.translation = {0, 0, -5};
  CHECK_FALSE(project_cuboid_to_rect(cam, unit, behind).has_value());

  Transform aside;  // fully in front, far off the left edge
  aside.translation = {-50, 0, 5};
  CHECK_FALSE(project_cuboid_to_rect(cam, unit, aside).has_value());

  Transform straddle;  // halfway off the left edge
  straddle.translation = {-8.2, 0, 5};
  const auto rect = project_cuboid_to_rect(cam, unit, straddle);
  REQUIRE(rect.has_value());
  const PixelRect want = corner_projection_rect(cam, unit, straddle);
  CHECK(rect->x_min == doctest::Approx(0.0));
  CHECK(rect->x_min == doctest::Approx(want.x_min));
  CHECK(rect->x_max == doctest::Approx(want.x_max));
}

TEST_CASE("project_cuboid_to_rect clips against the near plane") {
  const CameraModel cam = test_camera();
  const CuboidShape unit{{1, 1, 1}, {}};
  Transform straddling_near;
  straddling_near.translation = {0, 0, 0.3};  // front face behind the near plane

  const auto rect = project_cuboid_to_rect(cam, unit, straddling_near);
  REQUIRE(rect.has_value());
  // The near-plane cross-section spans +-0.5 m at z = 0.01, i.e. the whole
  // image after clamping.
  CHECK(rect->x_min == doctest::Approx(0.0));
  CHECK(rect->x_max == doctest::Approx(cam.width));
  CHECK(rect->y_min == doctest::Approx(0.0));
  CHECK(rect->y_max == doctest::Approx(cam.height));
}

TEST_CASE("darknet_normalize produces fractional boxes") {
  const PixelRect centered{240, 180, 400, 300};
  const DarknetBox quarter = darknet_normalize(centered, 1, 640, 480);
  CHECK(quarter.class_id == 1);
  CHECK(quarter.cx_frac == doctest::Approx(0.5));
  CHECK(quarter.cy_frac == doctest::Approx(0.5));
  CHECK(quarter.w_frac == doctest::Approx(0.25));
  CHECK(quarter.h_frac == doctest::Approx(0.25));

  const DarknetBox full = darknet_normalize({0, 0, 640, 480}, 0, 640, 480);
  CHECK(full.cx_frac == doctest::Approx(0.5));
  CHECK(full.w_frac == doctest::Approx(1.0));
  CHECK(full.h_frac == doctest::Approx(1.0));

  const DarknetBox corner = darknet_normalize({0, 0, 64, 48}, 2, 640, 480);
  CHECK(corner.class_id == 2);
  CHECK(corner.cx_frac == doctest::Approx(0.05));
  CHECK(corner.cy_frac == doctest::Approx(0.05));
  CHECK(corner.w_frac == doctest::Approx(0.1));
  CHECK(corner.h_frac == doctest::Approx(0.1));
}

}  // TEST_SUITE
