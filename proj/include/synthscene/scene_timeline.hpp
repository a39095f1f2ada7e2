#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthscene/geometry.hpp"

namespace synth {

class TimelineError : public std::runtime_error {
 public:
  enum class Code {
    MalformedLine,
    NonUnitQuaternion,
    CyclicTree,
    DuplicateTimestamp,
    EmptyOverlap,
    UnknownFrame,
    ExtrapolationRequired,
    NoPath,
  };

  TimelineError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct TimeSample {
  double t = 0.0;
  Transform transform;
};

// One parent->child edge: either a single static transform or a time-sorted
// sample buffer with strictly increasing timestamps.
struct TimelineEdge {
  std::string parent;
  std::string child;
  bool is_static = false;
  Transform static_transform;
  std::vector<TimeSample> samples;
};

// Forest of frames. Each child has exactly one parent edge.
class TransformTree {
 public:
  void add_static(const std::string& parent, const std::string& child, const Transform& tf);
  void add_sample(const std::string& parent, const std::string& child, double t,
                  const Transform& tf);
  // Sorts per-edge buffers and rejects duplicate timestamps.
  void finalize();

  bool has_frame(const std::string& frame) const { return frames_.count(frame) > 0; }
  const std::map<std::string, TimelineEdge>& edges_by_child() const { return edges_by_child_; }

  // Root of the frame's component (the frame itself if it has no parent).
  std::string root_of(const std::string& frame) const;
  // Child frame names along the path root -> frame.
  std::vector<std::string> path_from_root(const std::string& frame) const;

 private:
  void check_acyclic(const std::string& parent, const std::string& child) const;

  std::map<std::string, TimelineEdge> edges_by_child_;
  std::set<std::string> frames_;
};

struct TimeRange {
  double start = 0.0;
  double end = 0.0;
};

struct ReplayClock {
  double start_time = 0.0;
  double end_time = 0.0;
  double frame_rate = 10.0;  // Hz, > 0
};

// JSON Lines, one sample per line:
//   {"t": 1.5, "parent": "world", "child": "obj", "tx": 0, "ty": 0, "tz": 0,
//    "qx": 0, "qy": 0, "qz": 0, "qw": 1}
// "t": null marks a static transform ("static": true may accompany it).
// Lines may arrive in any time order. Unknown fields are ignored.
TransformTree parse_pose_log(std::istream& in);
TransformTree load_pose_log_file(const std::filesystem::path& path);

// Intersection of the dynamic-edge spans needed to reach every required
// frame. All-static trees yield the single-frame sentinel (0, 0).
TimeRange valid_time_range(const TransformTree& tree, std::span<const std::string> frames);

// Transform mapping source-frame points into the target frame at time t,
// interpolating per edge (lerp translation, shortest-arc slerp rotation).
Transform lookup_transform(const TransformTree& tree, const std::string& target,
                           const std::string& source, double t);

// start, start + 1/f, ... while the time stays <= end. Times come from index
// arithmetic (start + k/f), not accumulation.
std::vector<double> sample_times(const ReplayClock& clock);

}  // namespace synth
