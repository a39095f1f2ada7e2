#pragma once

#include <array>
#include <cmath>

namespace synth {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

// Unit quaternion (x, y, z, w). Identity by default.
struct Quat {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;

  Quat operator-() const { return {-x, -y, -z, -w}; }
};

inline double dot(const Quat& a, const Quat& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z + a.w * b.w;
}

inline double norm(const Quat& q) { return std::sqrt(dot(q, q)); }

inline Quat normalized(const Quat& q) {
  const double n = norm(q);
  return {q.x / n, q.y / n, q.z / n, q.w / n};
}

inline Quat conjugate(const Quat& q) { return {-q.x, -q.y, -q.z, q.w}; }

inline Quat operator*(const Quat& a, const Quat& b) {
  return {a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
          a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z};
}

inline Vec3 rotate(const Quat& q, const Vec3& v) {
  const Vec3 qv{q.x, q.y, q.z};
  const Vec3 t = cross(qv, v) * 2.0;
  return v + t * q.w + cross(qv, t);
}

inline Quat quat_from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 a = normalized(axis);
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return {a.x * s, a.y * s, a.z * s, std::cos(h)};
}

inline Quat quat_from_yaw(double yaw) { return quat_from_axis_angle({0, 0, 1}, yaw); }

// Shortest-arc spherical interpolation; falls back to normalized lerp when the
// quaternions are nearly parallel.
inline Quat slerp(const Quat& a, Quat b, double u) {
  double d = dot(a, b);
  if (d < 0.0) {
    b = -b;
    d = -d;
  }
  if (d > 1.0 - 1e-9) {
    Quat out{a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, a.z + (b.z - a.z) * u,
             a.w + (b.w - a.w) * u};
    return normalized(out);
  }
  const double theta = std::acos(std::min(1.0, d));
  const double s = std::sin(theta);
  const double wa = std::sin((1.0 - u) * theta) / s;
  const double wb = std::sin(u * theta) / s;
  return {a.x * wa + b.x * wb, a.y * wa + b.y * wb, a.z * wa + b.z * wb, a.w * wa + b.w * wb};
}

// Rigid transform: p_out = rotation * p_in + translation.
struct Transform {
  Vec3 translation;
  Quat rotation;

  Vec3 apply(const Vec3& p) const { return rotate(rotation, p) + translation; }
};

inline Transform compose(const Transform& a, const Transform& b) {
  return {a.translation + rotate(a.rotation, b.translation), normalized(a.rotation * b.rotation)};
}

inline Transform inverse(const Transform& t) {
  const Quat qi = conjugate(t.rotation);
  return {rotate(qi, -t.translation), qi};
}

inline Transform identity_transform() { return {}; }

// Columns are the rotated frame's axes expressed in the parent frame.
inline Quat quat_from_columns(const Vec3& cx, const Vec3& cy, const Vec3& cz) {
  const double m00 = cx.x, m01 = cy.x, m02 = cz.x;
  const double m10 = cx.y, m11 = cy.y, m12 = cz.y;
  const double m20 = cx.z, m21 = cy.z, m22 = cz.z;
  const double tr = m00 + m11 + m22;
  Quat q;
  if (tr > 0.0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m21 - m12) / s;
    q.y = (m02 - m20) / s;
    q.z = (m10 - m01) / s;
  } else if (m00 > m11 && m00 > m22) {
    const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
    q.w = (m21 - m12) / s;
    q.x = 0.25 * s;
    q.y = (m01 + m10) / s;
    q.z = (m02 + m20) / s;
  } else if (m11 > m22) {
    const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
    q.w = (m02 - m20) / s;
    q.x = (m01 + m10) / s;
    q.y = 0.25 * s;
    q.z = (m12 + m21) / s;
  } else {
    const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
    q.w = (m10 - m01) / s;
    q.x = (m02 + m20) / s;
    q.y = (m12 + m21) / s;
    q.z = 0.25 * s;
  }
  return normalized(q);
}

// Camera pose helper for the +z-forward / +y-down pinhole convention.
// `up` is the world up direction; the image +y axis ends up pointing against it.
inline Transform look_at_pose(const Vec3& eye, const Vec3& target, const Vec3& up = {0, 0, 1}) {
  const Vec3 z = normalized(target - eye);
  const Vec3 x = normalized(cross(z, up));
  const Vec3 y = cross(z, x);
  return {eye, quat_from_columns(x, y, z)};
}

}  // namespace synth
