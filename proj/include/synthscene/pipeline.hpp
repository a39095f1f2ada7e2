#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "synthscene/camera_projection.hpp"
#include "synthscene/renderer.hpp"

namespace synth {

class ConfigError : public std::runtime_error {
 public:
  enum class Code { MissingRequired, TypeMismatch, UnreadableFile };

  ConfigError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

enum class RunMode { Replay, Random };

struct ObjectSpec {
  std::string name;  // pose-log child frame in replay mode
  int class_id = 0;
  CuboidShape cuboid;
  std::optional<double> safety_radius;  // meters, required in random mode
  std::vector<Vec3> keypoints;          // object frame
};

struct SegmentationConfig {
  int num_bg_frames = 10;
  SubtractorParams subtractor;
  // Non-canonical: take visible-region masks from the id buffer instead of
  // running the background-subtraction protocol.
  bool visibility_masks = false;
};

struct WriterSpec {
  std::string kind;  // darknet | coco | keypoints
  std::optional<std::string> dir;
};

struct CameraConfig {
  CameraModel model;
  bool has_pose_literal = false;       // model.pose valid when set
  std::optional<std::string> frame;    // resolve pose via the pose log
};

struct Config {
  RunMode mode = RunMode::Replay;
  std::string pose_log_path;      // replay
  std::string map_image_path;     // random
  std::string map_metadata_path;  // random
  int frame_count = 0;            // random
  double frame_rate = 10.0;       // replay, Hz
  std::vector<ObjectSpec> objects;
  CameraConfig camera;
  std::string output_dir;
  std::vector<WriterSpec> writers;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  SegmentationConfig segmentation;
  int max_attempts = 1000;  // random
};

struct RunReport {
  int frames = 0;
  std::vector<std::pair<std::string, std::uint64_t>> writer_files;
  double wall_seconds = 0.0;
  std::uint64_t subtractor_invocations = 0;  // train + apply calls
};

// Validates required fields (reporting every missing one at once), applies
// the documented defaults with one warning per defaulted field, and warns on
// unknown keys. Warnings go to the diagnostic log and, when given, into
// `warnings`.
Config load_config(const std::filesystem::path& path,
                   std::vector<std::string>* warnings = nullptr);

using ProgressFn = std::function<void(int percent)>;
using SnapshotFn = std::function<void(const SceneSnapshot&)>;

// Replays the pose log at the configured frame rate over its valid time
// range, rendering, labeling and invoking every writer per frame.
RunReport run_replay(const Config& config, const ProgressFn& progress = {},
                     const SnapshotFn& snapshot = {});

// Samples collision-free poses on the occupancy map for each datapoint;
// earlier placements are marked occupied in a scratch map so later objects
// cannot collide with them.
RunReport run_random(const Config& config, const ProgressFn& progress = {},
                     const SnapshotFn& snapshot = {});

RunReport run(const Config& config, const ProgressFn& progress = {},
              const SnapshotFn& snapshot = {});

// Frame count a run would produce. Validates the pose log / map; writes
// nothing.
int planned_frame_count(const Config& config);

}  // namespace synth
