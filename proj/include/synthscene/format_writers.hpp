#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthscene/camera_projection.hpp"
#include "synthscene/renderer.hpp"

namespace synth {

class WriterError : public std::runtime_error {
 public:
  enum class Code { IoFailure, MissingMask };

  WriterError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct ObjectLabel {
  int class_id = 0;
  std::string name;
  std::optional<PixelRect> rect;          // nullopt = not visible
  std::optional<DarknetBox> box;
  std::vector<std::optional<Vec2>> cuboid_vertices;  // nullopt = behind near plane
  std::vector<std::optional<Vec2>> keypoints;
  const Mask* mask = nullptr;             // set iff segmentation ran this frame
};

struct LabelInputs {
  int frame_index = 0;
  std::string image_path;
  int image_width = 0;
  int image_height = 0;
  std::vector<ObjectLabel> objects;
};

// The writer contract: write_scene once per frame in frame order, finalize
// exactly once afterwards, requires_segmentation polled before the run.
class LabelWriter {
 public:
  virtual ~LabelWriter() = default;

  virtual void write_scene(const LabelInputs& inputs) = 0;
  virtual void finalize() = 0;
  virtual bool requires_segmentation() const = 0;

  virtual std::string name() const = 0;
  virtual std::uint64_t files_written() const { return 0; }
};

// frame_%06d.txt with one "<class> <cx> <cy> <w> <h>" line per visible
// object (fractions, 6 decimals), plus train_list.txt at finalize with image
// paths relative to the list file's directory.
class DarknetWriter : public LabelWriter {
 public:
  explicit DarknetWriter(std::filesystem::path dir);

  void write_scene(const LabelInputs& inputs) override;
  void finalize() override;
  bool requires_segmentation() const override { return false; }
  std::string name() const override { return "darknet"; }
  std::uint64_t files_written() const override { return files_written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> image_paths_;
  std::uint64_t files_written_ = 0;
};

// Accumulates per-frame instance annotations and emits annotations.json at
// finalize. Segmentation is uncompressed column-major RLE starting with the
// zero run; bbox and area come from the mask itself.
class CocoWriter : public LabelWriter {
 public:
  explicit CocoWriter(std::filesystem::path dir);

  void write_scene(const LabelInputs& inputs) override;
  void finalize() override;
  bool requires_segmentation() const override { return true; }
  std::string name() const override { return "coco"; }
  std::uint64_t files_written() const override { return files_written_; }

 private:
  struct ImageEntry {
    int id;
    std::string file_name;
    int width, height;
  };
  struct AnnotationEntry {
    int image_id;
    int class_id;
    int bbox[4];  // x, y, w, h in pixels
    std::uint64_t area;
    int mask_height, mask_width;
    std::vector<std::uint64_t> rle_counts;
  };

  std::filesystem::path dir_;
  std::vector<ImageEntry> images_;
  std::vector<AnnotationEntry> annotations_;
  std::map<int, std::string> category_names_;  // class_id -> first-seen object name
  std::uint64_t files_written_ = 0;
};

// frame_%06d_keypoints.txt, one line per object:
//   <class_id> <name> u1 v1 u2 v2 ...
// with "nan nan" for keypoints behind the near plane.
class KeypointWriter : public LabelWriter {
 public:
  explicit KeypointWriter(std::filesystem::path dir);

  void write_scene(const LabelInputs& inputs) override;
  void finalize() override {}
  bool requires_segmentation() const override { return false; }
  std::string name() const override { return "keypoints"; }
  std::uint64_t files_written() const override { return files_written_; }

 private:
  std::filesystem::path dir_;
  std::uint64_t files_written_ = 0;
};

class WriterRegistry {
 public:
  void add(std::unique_ptr<LabelWriter> writer) { writers_.push_back(std::move(writer)); }

  bool any_requires_segmentation() const;
  void write_scene(const LabelInputs& inputs);
  void finalize();

  std::size_t size() const { return writers_.size(); }
  LabelWriter& at(std::size_t i) { return *writers_[i]; }
  const LabelWriter& at(std::size_t i) const { return *writers_[i]; }

 private:
  std::vector<std::unique_ptr<LabelWriter>> writers_;
};

// Column-major run lengths, first count covering zeros (possibly 0 of them).
std::vector<std::uint64_t> rle_counts_column_major(const Mask& mask);

}  // namespace synth
