#include "synthscene/format_writers.hpp"

#include <cstdio>
#include <fstream>

namespace synth {

namespace {

std::string label_filename(int frame_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.txt", frame_index);
  return buf;
}

std::string keypoint_filename(int frame_index) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "frame_%06d_keypoints.txt", frame_index);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
  if (!out) {
    throw WriterError(WriterError::Code::IoFailure,
                      "cannot open " + path.string() + " for writing");
  }
  return out;
}

void check_stream(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) {
    throw WriterError(WriterError::Code::IoFailure, "failed writing " + path.string());
  }
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Darknet

DarknetWriter::DarknetWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void DarknetWriter::write_scene(const LabelInputs& inputs) {
  const std::filesystem::path path = dir_ / label_filename(inputs.frame_index);
  std::ofstream out = open_for_write(path);
  for (const ObjectLabel& obj : inputs.objects) {
    if (!obj.box) continue;
    char line[160];
    std::snprintf(line, sizeof(line), "%d %.6f %.6f %.6f %.6f\n", obj.box->class_id,
                  obj.box->cx_frac, obj.box->cy_frac, obj.box->w_frac, obj.box->h_frac);
    out << line;
  }
  check_stream(out, path);
  ++files_written_;

  const std::filesystem::path image =
      std::filesystem::absolute(inputs.image_path).lexically_normal();
  const std::filesystem::path base = std::filesystem::absolute(dir_).lexically_normal();
  const std::filesystem::path rel = image.lexically_relative(base);
  image_paths_.push_back(rel.empty() ? inputs.image_path : rel.generic_string());
}

void DarknetWriter::finalize() {
  const std::filesystem::path path = dir_ / "train_list.txt";
  std::ofstream out = open_for_write(path);
  for (const std::string& p : image_paths_) out << p << "\n";
  check_stream(out, path);
  ++files_written_;
}

// ---------------------------------------------------------------------------
// COCO

CocoWriter::CocoWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::vector<std::uint64_t> rle_counts_column_major(const Mask& mask) {
  std::vector<std::uint64_t> counts;
  bool current = false;  // RLE starts with the zero run
  std::uint64_t run = 0;
  for (int x = 0; x < mask.width; ++x) {
    for (int y = 0; y < mask.height; ++y) {
      const bool bit = mask.get(x, y);
      if (bit == current) {
        ++run;
      } else {
        counts.push_back(run);
        current = bit;
        run = 1;
      }
    }
  }
  counts.push_back(run);
  return counts;
}

void CocoWriter::write_scene(const LabelInputs& inputs) {
  const int image_id = static_cast<int>(images_.size()) + 1;
  images_.push_back({image_id, std::filesystem::path(inputs.image_path).filename().string(),
                     inputs.image_width, inputs.image_height});

  for (const ObjectLabel& obj : inputs.objects) {
    if (obj.mask == nullptr) {
      throw WriterError(WriterError::Code::MissingMask,
                        "coco writer needs instance masks but object '" + obj.name +
                            "' has none (frame " + std::to_string(inputs.frame_index) + ")");
    }
    category_names_.try_emplace(obj.class_id, obj.name);

    const Mask& mask = *obj.mask;
    int x_min = mask.width, y_min = mask.height, x_max = -1, y_max = -1;
    std::uint64_t area = 0;
    for (int y = 0; y < mask.height; ++y) {
      for (int x = 0; x < mask.width; ++x) {
        if (!mask.get(x, y)) continue;
        ++area;
        x_min = std::min(x_min, x);
        y_min = std::min(y_min, y);
        x_max = std::max(x_max, x);
        y_max = std::max(y_max, y);
      }
    }
    if (area == 0) continue;  // nothing visible, no annotation

    AnnotationEntry ann;
    ann.image_id = image_id;
    ann.class_id = obj.class_id;
    ann.bbox[0] = x_min;
    ann.bbox[1] = y_min;
    ann.bbox[2] = x_max - x_min + 1;
    ann.bbox[3] = y_max - y_min + 1;
    ann.area = area;
    ann.mask_width = mask.width;
    ann.mask_height = mask.height;
    ann.rle_counts = rle_counts_column_major(mask);
    annotations_.push_back(std::move(ann));
  }
}

void CocoWriter::finalize() {
  // Category ids are assigned 1..n over ascending class ids.
  std::map<int, int> category_id;
  int next = 1;
  for (const auto& [class_id, name] : category_names_) category_id[class_id] = next++;

  const std::filesystem::path path = dir_ / "annotations.json";
  std::ofstream out = open_for_write(path);

  out << "{\n  \"images\": [";
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const auto& img = images_[i];
    out << (i ? ",\n    " : "\n    ");
    out << "{\"id\": " << img.id << ", \"file_name\": \"" << json_escape(img.file_name)
        << "\", \"width\": " << img.width << ", \"height\": " << img.height << "}";
  }
  out << (images_.empty() ? "]" : "\n  ]");

  out << ",\n  \"categories\": [";
  {
    std::size_t i = 0;
    for (const auto& [class_id, name] : category_names_) {
      out << (i++ ? ",\n    " : "\n    ");
      out << "{\"id\": " << category_id[class_id] << ", \"name\": \"" << json_escape(name)
          << "\"}";
    }
  }
  out << (category_names_.empty() ? "]" : "\n  ]");

  out << ",\n  \"annotations\": [";
  for (std::size_t i = 0; i < annotations_.size(); ++i) {
    const auto& ann = annotations_[i];
    out << (i ? ",\n    " : "\n    ");
    out << "{\"id\": " << (i + 1) << ", \"image_id\": " << ann.image_id
        << ", \"category_id\": " << category_id[ann.class_id] << ", \"bbox\": [" << ann.bbox[0]
        << ", " << ann.bbox[1] << ", " << ann.bbox[2] << ", " << ann.bbox[3]
        << "], \"area\": " << ann.area << ", \"segmentation\": {\"size\": [" << ann.mask_height
        << ", " << ann.mask_width << "], \"counts\": [";
    for (std::size_t c = 0; c < ann.rle_counts.size(); ++c) {
      out << (c ? ", " : "") << ann.rle_counts[c];
    }
    out << "]}, \"iscrowd\": 0}";
  }
  out << (annotations_.empty() ? "]" : "\n  ]");
  out << "\n}\n";

  check_stream(out, path);
  ++files_written_;
}

// ---------------------------------------------------------------------------
// Keypoints

KeypointWriter::KeypointWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void KeypointWriter::write_scene(const LabelInputs& inputs) {
  const std::filesystem::path path = dir_ / keypoint_filename(inputs.frame_index);
  std::ofstream out = open_for_write(path);
  for (const ObjectLabel& obj : inputs.objects) {
    out << obj.class_id << " " << obj.name;
    for (const auto& kp : obj.keypoints) {
      if (kp) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %.6f %.6f", kp->x, kp->y);
        out << buf;
      } else {
        out << " nan nan";
      }
    }
    out << "\n";
  }
  check_stream(out, path);
  ++files_written_;
}

// ---------------------------------------------------------------------------
// Registry

bool WriterRegistry::any_requires_segmentation() const {
  for (const auto& w : writers_) {
    if (w->requires_segmentation()) return true;
  }
  return false;
}

void WriterRegistry::write_scene(const LabelInputs& inputs) {
  for (const auto& w : writers_) w->write_scene(inputs);
}

void WriterRegistry::finalize() {
  for (const auto& w : writers_) w->finalize();
}

}  // namespace synth
