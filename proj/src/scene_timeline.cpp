#include "synthscene/scene_timeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace synth {

namespace {

TimelineError at_line(TimelineError::Code code, std::size_t line_no, const std::string& msg) {
  return TimelineError(code, "pose log line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

void TransformTree::check_acyclic(const std::string& parent, const std::string& child) const {
  if (parent == child) {
    throw TimelineError(TimelineError::Code::CyclicTree,
                        "edge " + parent + "->" + child + " is a self loop");
  }
  const auto existing = edges_by_child_.find(child);
  if (existing != edges_by_child_.end() && existing->second.parent != parent) {
    throw TimelineError(TimelineError::Code::CyclicTree,
                        "frame '" + child + "' already has parent '" + existing->second.parent +
                            "', cannot also attach under '" + parent + "'");
  }
  // Walking up from the new parent must not reach the child.
  std::string cur = parent;
  for (;;) {
    const auto it = edges_by_child_.find(cur);
    if (it == edges_by_child_.end()) break;
    cur = it->second.parent;
    if (cur == child) {
      throw TimelineError(TimelineError::Code::CyclicTree,
                          "edge " + parent + "->" + child + " would close a cycle");
    }
  }
}

void TransformTree::add_static(const std::string& parent, const std::string& child,
                               const Transform& tf) {
  check_acyclic(parent, child);
  auto [it, inserted] = edges_by_child_.try_emplace(child);
  TimelineEdge& edge = it->second;
  if (!inserted) {
    if (edge.is_static) {
      throw TimelineError(TimelineError::Code::DuplicateTimestamp,
                          "edge " + parent + "->" + child + " has more than one static entry");
    }
    throw TimelineError(TimelineError::Code::DuplicateTimestamp,
                        "edge " + parent + "->" + child + " mixes static and timed samples");
  }
  edge.parent = parent;
  edge.child = child;
  edge.is_static = true;
  edge.static_transform = tf;
  frames_.insert(parent);
  frames_.insert(child);
}

void TransformTree::add_sample(const std::string& parent, const std::string& child, double t,
                               const Transform& tf) {
  check_acyclic(parent, child);
  auto [it, inserted] = edges_by_child_.try_emplace(child);
  TimelineEdge& edge = it->second;
  if (!inserted && edge.is_static) {
    throw TimelineError(TimelineError::Code::DuplicateTimestamp,
                        "edge " + parent + "->" + child + " mixes static and timed samples");
  }
  edge.parent = parent;
  edge.child = child;
  edge.samples.push_back({t, tf});
  frames_.insert(parent);
  frames_.insert(child);
}

void TransformTree::finalize() {
  for (auto& [child, edge] : edges_by_child_) {
    if (edge.is_static) continue;
    std::sort(edge.samples.begin(), edge.samples.end(),
              [](const TimeSample& a, const TimeSample& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < edge.samples.size(); ++i) {
      if (edge.samples[i].t == edge.samples[i - 1].t) {
        throw TimelineError(TimelineError::Code::DuplicateTimestamp,
                            "edge " + edge.parent + "->" + child + " has duplicate timestamp " +
                                std::to_string(edge.samples[i].t));
      }
    }
  }
}

std::string TransformTree::root_of(const std::string& frame) const {
  std::string cur = frame;
  for (;;) {
    const auto it = edges_by_child_.find(cur);
    if (it == edges_by_child_.end()) return cur;
    cur = it->second.parent;
  }
}

std::vector<std::string> TransformTree::path_from_root(const std::string& frame) const {
  std::vector<std::string> children;
  std::string cur = frame;
  for (;;) {
    const auto it = edges_by_child_.find(cur);
    if (it == edges_by_child_.end()) break;
    children.push_back(cur);
    cur = it->second.parent;
  }
  std::reverse(children.begin(), children.end());
  return children;
}

TransformTree parse_pose_log(std::istream& in) {
  TransformTree tree;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw at_line(TimelineError::Code::MalformedLine, line_no, e.what());
    }
    if (!j.is_object()) {
      throw at_line(TimelineError::Code::MalformedLine, line_no, "expected a JSON object");
    }

    std::string parent, child;
    Transform tf;
    bool is_static = false;
    try {
      parent = j.at("parent").get<std::string>();
      child = j.at("child").get<std::string>();
      tf.translation = {j.at("tx").get<double>(), j.at("ty").get<double>(),
                        j.at("tz").get<double>()};
      tf.rotation = {j.at("qx").get<double>(), j.at("qy").get<double>(), j.at("qz").get<double>(),
                     j.at("qw").get<double>()};
      const auto& t = j.at("t");
      if (t.is_null()) {
        is_static = true;
      } else if (!t.is_number()) {
        throw at_line(TimelineError::Code::MalformedLine, line_no, "t must be a number or null");
      }
      if (j.contains("static")) {
        if (!j.at("static").is_boolean() || j.at("static").get<bool>() != is_static) {
          throw at_line(TimelineError::Code::MalformedLine, line_no,
                        "\"static\" flag contradicts \"t\"");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw at_line(TimelineError::Code::MalformedLine, line_no, e.what());
    }
    if (parent.empty() || child.empty()) {
      throw at_line(TimelineError::Code::MalformedLine, line_no, "frame names must be nonempty");
    }

    const double qnorm = norm(tf.rotation);
    if (std::abs(qnorm - 1.0) > 1e-3) {
      throw at_line(TimelineError::Code::NonUnitQuaternion, line_no,
                    "quaternion norm " + std::to_string(qnorm));
    }
    tf.rotation = normalized(tf.rotation);

    try {
      if (is_static) {
        tree.add_static(parent, child, tf);
      } else {
        tree.add_sample(parent, child, j.at("t").get<double>(), tf);
      }
    } catch (const TimelineError& e) {
      throw at_line(e.code(), line_no, e.what());
    }
  }
  tree.finalize();
  return tree;
}

TransformTree load_pose_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw TimelineError(TimelineError::Code::MalformedLine, "cannot open " + path.string());
  }
  return parse_pose_log(in);
}

TimeRange valid_time_range(const TransformTree& tree, std::span<const std::string> frames) {
  if (frames.empty()) return {0.0, 0.0};
  for (const auto& frame : frames) {
    if (!tree.has_frame(frame)) {
      throw TimelineError(TimelineError::Code::UnknownFrame, "unknown frame '" + frame + "'");
    }
  }
  const std::string root = tree.root_of(frames.front());
  std::set<std::string> needed_children;
  for (const auto& frame : frames) {
    if (tree.root_of(frame) != root) {
      throw TimelineError(TimelineError::Code::NoPath,
                          "frame '" + frame + "' is not connected to '" + root + "'");
    }
    for (const auto& child : tree.path_from_root(frame)) {
      needed_children.insert(child);
    }
  }

  bool any_dynamic = false;
  double start = 0.0, end = 0.0;
  for (const auto& child : needed_children) {
    const TimelineEdge& edge = tree.edges_by_child().at(child);
    if (edge.is_static) continue;
    const double first = edge.samples.front().t;
    const double last = edge.samples.back().t;
    if (!any_dynamic) {
      start = first;
      end = last;
      any_dynamic = true;
    } else {
      start = std::max(start, first);
      end = std::min(end, last);
    }
  }
  if (!any_dynamic) return {0.0, 0.0};  // single-frame sentinel
  if (start > end) {
    throw TimelineError(TimelineError::Code::EmptyOverlap,
                        "dynamic edges have no common time span (start " + std::to_string(start) +
                            " > end " + std::to_string(end) + ")");
  }
  return {start, end};
}

namespace {

Transform edge_value_at(const TimelineEdge& edge, double t) {
  if (edge.is_static) return edge.static_transform;
  const auto& samples = edge.samples;
  if (t < samples.front().t || t > samples.back().t) {
    throw TimelineError(TimelineError::Code::ExtrapolationRequired,
                        "t=" + std::to_string(t) + " outside edge " + edge.parent + "->" +
                            edge.child + " span [" + std::to_string(samples.front().t) + ", " +
                            std::to_string(samples.back().t) + "]");
  }
  const auto upper = std::lower_bound(
      samples.begin(), samples.end(), t,
      [](const TimeSample& s, double value) { return s.t < value; });
  if (upper->t == t) return upper->transform;
  const auto lower = std::prev(upper);
  const double u = (t - lower->t) / (upper->t - lower->t);
  Transform out;
  out.translation = lower->transform.translation +
                    (upper->transform.translation - lower->transform.translation) * u;
  out.rotation = slerp(lower->transform.rotation, upper->transform.rotation, u);
  return out;
}

}  // namespace

Transform lookup_transform(const TransformTree& tree, const std::string& target,
                           const std::string& source, double t) {
  if (target == source) return identity_transform();
  if (!tree.has_frame(target) || !tree.has_frame(source)) {
    throw TimelineError(TimelineError::Code::NoPath,
                        "no path between '" + target + "' and '" + source + "'");
  }

  // Lowest common ancestor via the two root paths.
  const std::vector<std::string> target_path = tree.path_from_root(target);
  const std::vector<std::string> source_path = tree.path_from_root(source);
  if (tree.root_of(target) != tree.root_of(source)) {
    throw TimelineError(TimelineError::Code::NoPath,
                        "'" + target + "' and '" + source + "' are in different trees");
  }
  std::size_t common = 0;
  while (common < target_path.size() && common < source_path.size() &&
         target_path[common] == source_path[common]) {
    ++common;
  }

  auto chain_from_ancestor = [&](const std::vector<std::string>& path) {
    Transform acc = identity_transform();
    for (std::size_t i = common; i < path.size(); ++i) {
      acc = compose(acc, edge_value_at(tree.edges_by_child().at(path[i]), t));
    }
    return acc;  // maps frame points into the common-ancestor frame
  };

  const Transform anc_from_target = chain_from_ancestor(target_path);
  const Transform anc_from_source = chain_from_ancestor(source_path);
  return compose(inverse(anc_from_target), anc_from_source);
}

std::vector<double> sample_times(const ReplayClock& clock) {
  std::vector<double> times;
  for (std::uint64_t k = 0;; ++k) {
    const double t = clock.start_time + static_cast<double>(k) / clock.frame_rate;
    if (t > clock.end_time) break;
    times.push_back(t);
  }
  return times;
}

}  // namespace synth
