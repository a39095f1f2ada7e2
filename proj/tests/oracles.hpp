#pragma once

// Test-only reference implementations. These are kept independent of the
// library code they check: naive, brute-force, written from the definitions.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Naive PGM reference codec (written before the production parser).

inline std::string encode_p5(int width, int height, const std::vector<std::uint8_t>& pixels) {
  std::ostringstream out;
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  return out.str();
}

inline std::string encode_p2(int width, int height, const std::vector<std::uint8_t>& pixels) {
  std::ostringstream out;
  out << "P2\n" << width << " " << height << "\n255\n";
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    out << static_cast<int>(pixels[i]) << ((i + 1) % 16 == 0 ? "\n" : " ");
  }
  out << "\n";
  return out.str();
}

// Decodes only what encode_p5 produces.
inline std::vector<std::uint8_t> decode_p5(const std::string& bytes, int& width, int& height) {
  std::istringstream in(bytes);
  std::string magic;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  in.get();  // single separator
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  return pixels;
}

// ---------------------------------------------------------------------------
// Midpoint circle: per octant row, the column minimizing |x^2 + y^2 - r^2|.

inline std::set<std::pair<int, int>> midpoint_circle(int r) {
  std::set<std::pair<int, int>> cells;
  if (r <= 0) {
    cells.insert({0, 0});
    return cells;
  }
  for (int y = 0;; ++y) {
    const int x = static_cast<int>(std::llround(std::sqrt(
        static_cast<double>(r) * r - static_cast<double>(y) * y)));
    if (x < y) break;
    const int pts[8][2] = {{x, y},  {-x, y}, {x, -y}, {-x, -y},
                           {y, x},  {-y, x}, {y, -x}, {-y, -x}};
    for (const auto& p : pts) cells.insert({p[0], p[1]});
  }
  return cells;
}

// ---------------------------------------------------------------------------
// 4x4 homogeneous matrices, the independent route for rigid-transform math.

struct Mat4 {
  double m[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
};

inline Mat4 mat_from_quat_trans(double qx, double qy, double qz, double qw, double tx, double ty,
                                double tz) {
  Mat4 out;
  out.m[0][0] = 1 - 2 * (qy * qy + qz * qz);
  out.m[0][1] = 2 * (qx * qy - qz * qw);
  out.m[0][2] = 2 * (qx * qz + qy * qw);
  out.m[1][0] = 2 * (qx * qy + qz * qw);
  out.m[1][1] = 1 - 2 * (qx * qx + qz * qz);
  out.m[1][2] = 2 * (qy * qz - qx * qw);
  out.m[2][0] = 2 * (qx * qz - qy * qw);
  out.m[2][1] = 2 * (qy * qz + qx * qw);
  out.m[2][2] = 1 - 2 * (qx * qx + qy * qy);
  out.m[0][3] = tx;
  out.m[1][3] = ty;
  out.m[2][3] = tz;
  return out;
}

inline Mat4 matmul(const Mat4& a, const Mat4& b) {
  Mat4 out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double sum = 0;
      for (int k = 0; k < 4; ++k) sum += a.m[r][k] * b.m[k][c];
      out.m[r][c] = sum;
    }
  }
  return out;
}

inline Mat4 invert_rigid(const Mat4& a) {
  Mat4 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.m[r][c] = a.m[c][r];
  }
  for (int r = 0; r < 3; ++r) {
    out.m[r][3] = -(out.m[r][0] * a.m[0][3] + out.m[r][1] * a.m[1][3] + out.m[r][2] * a.m[2][3]);
  }
  return out;
}

inline void apply_mat(const Mat4& a, const double in[3], double out[3]) {
  for (int r = 0; r < 3; ++r) {
    out[r] = a.m[r][0] * in[0] + a.m[r][1] * in[1] + a.m[r][2] * in[2] + a.m[r][3];
  }
}

// ---------------------------------------------------------------------------
// Misc helpers

inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("synthscene_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
