#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "synthscene/renderer.hpp"

namespace synth {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Binary PPM (P6, maxval 255).
void write_ppm(const std::filesystem::path& path, const Frame& frame);

// Binary PGM (P5, maxval 255): 0 = background, 255 = object.
void write_mask_pgm(const std::filesystem::path& path, const Mask& mask);

std::string frame_filename(int frame_index);                 // frame_%06d.ppm
std::string mask_filename(int frame_index, int object_index);  // mask_%06d_obj%02d.pgm

}  // namespace synth
