#include "synthscene/renderer.hpp"

#include <algorithm>
#include <cmath>

#include "synthscene/random.hpp"

namespace synth {

namespace {

constexpr int kCheckerTile = 16;
constexpr std::uint8_t kCheckerDark = 170;
constexpr std::uint8_t kCheckerLight = 230;
constexpr double kAmbient = 0.35;
constexpr double kDiffuse = 0.65;
const Vec3 kLightDir = normalized(Vec3{0.3, -0.4, 0.85});  // world frame, toward the light

constexpr Rgb kPalette[8] = {
    {140, 30, 30}, {30, 60, 150}, {150, 110, 20}, {20, 120, 130},
    {120, 20, 200}, {200, 80, 40}, {40, 100, 160}, {170, 40, 80},
};

struct RasterBuffers {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> ids;    // -1 = background
  std::vector<double> inv_z;        // larger = closer
  std::vector<double> shade;
};

struct CameraTriangle {
  Vec3 v[3];     // camera frame
  double shade;  // flat Lambert term for the face
};

// Quad corner order walking the face perimeter; free-bit patterns 00,01,11,10.
void face_corner_indices(int axis, bool positive, int out[4]) {
  const int b1 = axis == 0 ? 1 : 0;
  const int b2 = axis == 2 ? 1 : 2;
  const int fixed = positive ? (1 << axis) : 0;
  const int pattern[4][2] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  for (int i = 0; i < 4; ++i) {
    out[i] = fixed | (pattern[i][0] ? (1 << b1) : 0) | (pattern[i][1] ? (1 << b2) : 0);
  }
}

void collect_triangles(const RenderObject& obj, const CameraModel& cam,
                       std::vector<CameraTriangle>& out) {
  const Transform cam_from_world = inverse(cam.pose);
  const Transform cam_from_obj = compose(cam_from_world, obj.world_pose);
  const std::array<Vec3, 8> local = cuboid_vertices(obj.shape);
  std::array<Vec3, 8> in_cam;
  for (int i = 0; i < 8; ++i) in_cam[i] = cam_from_obj.apply(local[i]);

  const Quat cuboid_rot = normalized(obj.world_pose.rotation * obj.shape.offset.rotation);
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign = 0; sign < 2; ++sign) {
      const double s = sign ? 1.0 : -1.0;
      const Vec3 local_normal{axis == 0 ? s : 0.0, axis == 1 ? s : 0.0, axis == 2 ? s : 0.0};
      const Vec3 n_world = rotate(cuboid_rot, local_normal);
      const double shade = kAmbient + kDiffuse * std::max(0.0, dot(n_world, kLightDir));

      int q[4];
      face_corner_indices(axis, sign != 0, q);
      out.push_back({{in_cam[q[0]], in_cam[q[1]], in_cam[q[2]]}, shade});
      out.push_back({{in_cam[q[0]], in_cam[q[2]], in_cam[q[3]]}, shade});
    }
  }
}

// Sutherland-Hodgman against z >= near. A triangle clips to at most 4 points.
int clip_near(const Vec3 in[3], double near_z, Vec3 out[4]) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = in[i];
    const Vec3& b = in[(i + 1) % 3];
    const bool a_in = a.z >= near_z;
    const bool b_in = b.z >= near_z;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double u = (near_z - a.z) / (b.z - a.z);
      out[n++] = {a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, near_z};
    }
  }
  return n;
}

void raster_triangle(const CameraModel& cam, const Vec3 v_cam[3], double shade,
                     std::int32_t object_index, RasterBuffers& buf) {
  Vec2 p[3];
  double inv_z[3];
  for (int i = 0; i < 3; ++i) {
    inv_z[i] = 1.0 / v_cam[i].z;
    p[i] = {cam.fx * v_cam[i].x * inv_z[i] + cam.cx, cam.fy * v_cam[i].y * inv_z[i] + cam.cy};
  }

  auto edge = [](const Vec2& a, const Vec2& b, double px, double py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
  };
  double area = edge(p[0], p[1], p[2].x, p[2].y);
  if (area == 0.0) return;
  if (area < 0.0) {
    std::swap(p[1], p[2]);
    std::swap(inv_z[1], inv_z[2]);
    area = -area;
  }

  const double u_min = std::min({p[0].x, p[1].x, p[2].x});
  const double u_max = std::max({p[0].x, p[1].x, p[2].x});
  const double v_min = std::min({p[0].y, p[1].y, p[2].y});
  const double v_max = std::max({p[0].y, p[1].y, p[2].y});
  const int x0 = std::max(0, static_cast<int>(std::ceil(u_min - 0.5)));
  const int x1 = std::min(buf.width - 1, static_cast<int>(std::floor(u_max - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(v_min - 0.5)));
  const int y1 = std::min(buf.height - 1, static_cast<int>(std::floor(v_max - 0.5)));

  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5;
      const double w0 = edge(p[1], p[2], px, py);
      const double w1 = edge(p[2], p[0], px, py);
      const double w2 = edge(p[0], p[1], px, py);
      // Inclusive on all edges: watertight across shared edges, and boundary
      // pixel centers stay inside the projected hull.
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      // 1/z interpolates linearly in screen space.
      const double z_recip = (w0 * inv_z[0] + w1 * inv_z[1] + w2 * inv_z[2]) / area;
      const std::size_t idx = static_cast<std::size_t>(y) * buf.width + x;
      if (z_recip > buf.inv_z[idx]) {
        buf.inv_z[idx] = z_recip;
        buf.ids[idx] = object_index;
        buf.shade[idx] = shade;
      }
    }
  }
}

RasterBuffers rasterize(std::span<const RenderObject> objects, const CameraModel& cam) {
  RasterBuffers buf;
  buf.width = cam.width;
  buf.height = cam.height;
  const std::size_t n = static_cast<std::size_t>(cam.width) * cam.height;
  buf.ids.assign(n, -1);
  buf.inv_z.assign(n, 0.0);
  buf.shade.assign(n, 0.0);

  std::vector<CameraTriangle> triangles;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (!objects[i].visible) continue;
    triangles.clear();
    collect_triangles(objects[i], cam, triangles);
    for (const CameraTriangle& tri : triangles) {
      Vec3 clipped[4];
      const int count = clip_near(tri.v, cam.near_plane, clipped);
      for (int k = 2; k < count; ++k) {
        const Vec3 fan[3] = {clipped[0], clipped[k - 1], clipped[k]};
        raster_triangle(cam, fan, tri.shade, static_cast<std::int32_t>(i), buf);
      }
    }
  }
  return buf;
}

std::uint8_t checker_tone(int x, int y) {
  return ((x / kCheckerTile + y / kCheckerTile) % 2 == 0) ? kCheckerDark : kCheckerLight;
}

}  // namespace

double luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

Rgb class_color(int class_id) {
  return kPalette[((class_id % 8) + 8) % 8];
}

std::uint64_t Mask::count_set() const {
  std::uint64_t n = 0;
  for (const std::uint8_t b : bits) n += b;
  return n;
}

Frame render_scene(std::span<const RenderObject> objects, const CameraModel& cam,
                   const RenderOptions& options) {
  const RasterBuffers buf = rasterize(objects, cam);
  Frame frame;
  frame.width = cam.width;
  frame.height = cam.height;
  frame.rgb.resize(static_cast<std::size_t>(cam.width) * cam.height * 3);

  std::size_t px = 0;
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x, ++px) {
      std::uint8_t r, g, b;
      if (buf.ids[px] < 0) {
        r = g = b = checker_tone(x, y);
      } else {
        const Rgb base = class_color(objects[buf.ids[px]].class_id);
        const double s = buf.shade[px];
        r = static_cast<std::uint8_t>(std::lround(base.r * s));
        g = static_cast<std::uint8_t>(std::lround(base.g * s));
        b = static_cast<std::uint8_t>(std::lround(base.b * s));
      }
      frame.rgb[px * 3 + 0] = r;
      frame.rgb[px * 3 + 1] = g;
      frame.rgb[px * 3 + 2] = b;
    }
  }

  if (options.noise_sigma > 0.0) {
    Xoshiro256pp rng(options.seed);
    for (auto& channel : frame.rgb) {
      const double noisy = channel + options.noise_sigma * rng.normal();
      channel = static_cast<std::uint8_t>(std::clamp(std::lround(noisy), 0L, 255L));
    }
  }
  return frame;
}

IdBuffer render_id_buffer(std::span<const RenderObject> objects, const CameraModel& cam) {
  RasterBuffers buf = rasterize(objects, cam);
  IdBuffer out;
  out.width = buf.width;
  out.height = buf.height;
  out.ids = std::move(buf.ids);
  return out;
}

BackgroundModel train_background(std::span<const Frame> frames, RenderCounters* counters) {
  if (counters != nullptr) ++counters->train_calls;
  if (frames.empty()) {
    throw RenderError(RenderError::Code::DimensionMismatch, "no frames to train on");
  }
  const int w = frames.front().width;
  const int h = frames.front().height;
  for (const Frame& f : frames) {
    if (f.width != w || f.height != h) {
      throw RenderError(RenderError::Code::DimensionMismatch,
                        "training frames have mismatched dimensions");
    }
  }

  BackgroundModel model;
  model.width = w;
  model.height = h;
  model.trained_frames = static_cast<int>(frames.size());
  const std::size_t n = static_cast<std::size_t>(w) * h;
  model.mean.assign(n, 0.0);
  model.variance.assign(n, 0.0);

  for (const Frame& f : frames) {
    for (std::size_t i = 0; i < n; ++i) {
      model.mean[i] += luminance(f.rgb[i * 3], f.rgb[i * 3 + 1], f.rgb[i * 3 + 2]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) model.mean[i] /= model.trained_frames;
  for (const Frame& f : frames) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d =
          luminance(f.rgb[i * 3], f.rgb[i * 3 + 1], f.rgb[i * 3 + 2]) - model.mean[i];
      model.variance[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) model.variance[i] /= model.trained_frames;
  return model;
}

Mask subtract(const BackgroundModel& model, const Frame& frame, const SubtractorParams& params,
              RenderCounters* counters) {
  if (counters != nullptr) ++counters->subtract_calls;
  if (frame.width != model.width || frame.height != model.height) {
    throw RenderError(RenderError::Code::DimensionMismatch,
                      "frame dimensions do not match the background model");
  }
  Mask mask;
  mask.width = frame.width;
  mask.height = frame.height;
  const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
  mask.bits.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double lum = luminance(frame.rgb[i * 3], frame.rgb[i * 3 + 1], frame.rgb[i * 3 + 2]);
    const double d = lum - model.mean[i];
    mask.bits[i] = (d * d > params.k * model.variance[i] + params.tau) ? 1 : 0;
  }
  return mask;
}

Mask filter_mask_with_bbox(const Mask& mask, const PixelRect& rect) {
  Mask out;
  out.width = mask.width;
  out.height = mask.height;
  out.bits.assign(mask.bits.size(), 0);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.get(x, y) && rect.contains(x + 0.5, y + 0.5)) out.set(x, y, true);
    }
  }
  return out;
}

std::vector<Mask> isolated_object_masks(std::span<const RenderObject> objects,
                                        const CameraModel& cam, const BackgroundModel& model,
                                        const SubtractorParams& params,
                                        const RenderOptions& options, RenderCounters* counters) {
  std::vector<Mask> masks;
  masks.reserve(objects.size());
  const Transform cam_from_world = inverse(cam.pose);

  std::vector<RenderObject> solo(objects.begin(), objects.end());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    Mask empty;
    empty.width = model.width;
    empty.height = model.height;
    empty.bits.assign(static_cast<std::size_t>(model.width) * model.height, 0);
    if (!objects[i].visible) {
      masks.push_back(std::move(empty));
      continue;
    }

    for (std::size_t j = 0; j < solo.size(); ++j) solo[j].visible = (j == i);
    const RenderOptions solo_options{options.noise_sigma, mix_seed(options.seed, i + 1)};
    const Frame frame = render_scene(solo, cam, solo_options);
    const Mask raw = subtract(model, frame, params, counters);

    const Transform pose_in_cam = compose(cam_from_world, objects[i].world_pose);
    const auto rect = project_cuboid_to_rect(cam, objects[i].shape, pose_in_cam);
    masks.push_back(rect ? filter_mask_with_bbox(raw, *rect) : std::move(empty));
  }
  return masks;
}

std::vector<Mask> visibility_object_masks(std::span<const RenderObject> objects,
                                          const CameraModel& cam) {
  const IdBuffer ids = render_id_buffer(objects, cam);
  std::vector<Mask> masks(objects.size());
  for (Mask& mask : masks) {
    mask.width = ids.width;
    mask.height = ids.height;
    mask.bits.assign(ids.ids.size(), 0);
  }
  for (std::size_t i = 0; i < ids.ids.size(); ++i) {
    const std::int32_t id = ids.ids[i];
    if (id >= 0) masks[static_cast<std::size_t>(id)].bits[i] = 1;
  }
  return masks;
}

}  // namespace synth
