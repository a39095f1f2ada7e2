#include "synthscene/image_io.hpp"

#include <cstdio>
#include <fstream>

namespace synth {

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.rgb.data()),
            static_cast<std::streamsize>(frame.rgb.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_mask_pgm(const std::filesystem::path& path, const Mask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<std::uint8_t> bytes(mask.bits.size());
  for (std::size_t i = 0; i < mask.bits.size(); ++i) bytes[i] = mask.bits[i] ? 255 : 0;
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string frame_filename(int frame_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.ppm", frame_index);
  return buf;
}

std::string mask_filename(int frame_index, int object_index) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "mask_%06d_obj%02d.pgm", frame_index, object_index);
  return buf;
}

}  // namespace synth
