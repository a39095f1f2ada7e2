#include "synthscene/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include "json.hpp"
#include "synthscene/format_writers.hpp"
#include "synthscene/image_io.hpp"
#include "synthscene/log.hpp"
#include "synthscene/occupancy_map.hpp"
#include "synthscene/pose_sampler.hpp"
#include "synthscene/random.hpp"
#include "synthscene/scene_timeline.hpp"

namespace synth {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

[[noreturn]] void type_error(const std::string& path, const std::string& detail) {
  throw ConfigError(ConfigError::Code::TypeMismatch, path + ": " + detail);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) type_error(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) type_error(path, "expected an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) type_error(path, "expected a string");
  return v.get<std::string>();
}

struct ConfigReader {
  std::vector<std::string>* warnings = nullptr;
  std::vector<std::string> missing;

  void warn(const std::string& msg) {
    log_line(LogLevel::Warn, msg);
    if (warnings != nullptr) warnings->push_back(msg);
  }

  void warn_default(const std::string& field, const std::string& value) {
    warn("config: optional field '" + field + "' unspecified, using default " + value);
  }

  void check_unknown(const json& obj, const std::set<std::string>& known,
                     const std::string& scope) {
    for (const auto& [key, value] : obj.items()) {
      if (known.count(key) == 0) {
        warn("config: unknown key '" + (scope.empty() ? key : scope + "." + key) + "' ignored");
      }
    }
  }

  Transform parse_pose(const json& v, const std::string& path) {
    if (!v.is_object()) type_error(path, "expected a pose object");
    check_unknown(v, {"tx", "ty", "tz", "qx", "qy", "qz", "qw"}, path);
    for (const char* key : {"tx", "ty", "tz", "qx", "qy", "qz", "qw"}) {
      if (!v.contains(key)) {
        throw ConfigError(ConfigError::Code::MissingRequired,
                          "config: missing required field " + path + "." + key);
      }
    }
    Transform tf;
    tf.translation = {as_number(v["tx"], path + ".tx"), as_number(v["ty"], path + ".ty"),
                      as_number(v["tz"], path + ".tz")};
    tf.rotation = {as_number(v["qx"], path + ".qx"), as_number(v["qy"], path + ".qy"),
                   as_number(v["qz"], path + ".qz"), as_number(v["qw"], path + ".qw")};
    if (std::abs(norm(tf.rotation) - 1.0) > 1e-3) {
      type_error(path, "quaternion is not unit length");
    }
    tf.rotation = normalized(tf.rotation);
    return tf;
  }

  Vec3 parse_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) type_error(path, "expected an array of 3 numbers");
    return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
            as_number(v[2], path + "[2]")};
  }

  CuboidShape parse_cuboid(const json& v, const std::string& path) {
    if (!v.is_object()) type_error(path, "expected an object");
    check_unknown(v, {"size", "offset"}, path);
    CuboidShape shape;
    if (!v.contains("size")) {
      throw ConfigError(ConfigError::Code::MissingRequired,
                        "config: missing required field " + path + ".size");
    }
    shape.size = parse_vec3(v["size"], path + ".size");
    if (shape.size.x <= 0 || shape.size.y <= 0 || shape.size.z <= 0) {
      type_error(path + ".size", "all cuboid dimensions must be > 0");
    }
    if (v.contains("offset")) shape.offset = parse_pose(v["offset"], path + ".offset");
    return shape;
  }

  ObjectSpec parse_object(const json& v, const std::string& path) {
    if (!v.is_object()) type_error(path, "expected an object");
    check_unknown(v, {"name", "class_id", "cuboid", "safety_radius", "keypoints"}, path);
    ObjectSpec spec;
    for (const char* key : {"name", "class_id", "cuboid"}) {
      if (!v.contains(key)) missing.push_back(path + "." + key);
    }
    if (v.contains("name")) spec.name = as_string(v["name"], path + ".name");
    if (v.contains("class_id")) {
      spec.class_id = as_int(v["class_id"], path + ".class_id");
      if (spec.class_id < 0) type_error(path + ".class_id", "must be >= 0");
    }
    if (v.contains("cuboid")) spec.cuboid = parse_cuboid(v["cuboid"], path + ".cuboid");
    if (v.contains("safety_radius")) {
      spec.safety_radius = as_number(v["safety_radius"], path + ".safety_radius");
      if (*spec.safety_radius <= 0) type_error(path + ".safety_radius", "must be > 0");
    }
    if (v.contains("keypoints")) {
      const json& kps = v["keypoints"];
      if (!kps.is_array()) type_error(path + ".keypoints", "expected an array");
      for (std::size_t i = 0; i < kps.size(); ++i) {
        spec.keypoints.push_back(
            parse_vec3(kps[i], path + ".keypoints[" + std::to_string(i) + "]"));
      }
    }
    return spec;
  }

  CameraConfig parse_camera(const json& v, const std::string& path) {
    if (!v.is_object()) type_error(path, "expected an object");
    check_unknown(v, {"fx", "fy", "cx", "cy", "width", "height", "near_plane", "pose", "frame"},
                  path);
    CameraConfig cam;
    for (const char* key : {"fx", "fy", "cx", "cy", "width", "height"}) {
      if (!v.contains(key)) missing.push_back(path + "." + std::string(key));
    }
    if (v.contains("fx")) cam.model.fx = as_number(v["fx"], path + ".fx");
    if (v.contains("fy")) cam.model.fy = as_number(v["fy"], path + ".fy");
    if (v.contains("cx")) cam.model.cx = as_number(v["cx"], path + ".cx");
    if (v.contains("cy")) cam.model.cy = as_number(v["cy"], path + ".cy");
    if (v.contains("width")) cam.model.width = as_int(v["width"], path + ".width");
    if (v.contains("height")) cam.model.height = as_int(v["height"], path + ".height");
    if (cam.model.fx <= 0 || cam.model.fy <= 0) type_error(path, "fx and fy must be > 0");
    if (cam.model.width < 1 || cam.model.height < 1) {
      type_error(path, "width and height must be >= 1");
    }
    if (v.contains("near_plane")) {
      cam.model.near_plane = as_number(v["near_plane"], path + ".near_plane");
      if (cam.model.near_plane <= 0) type_error(path + ".near_plane", "must be > 0");
    } else {
      warn_default(path + ".near_plane", "0.01");
    }
    if (v.contains("pose")) {
      cam.model.pose = parse_pose(v["pose"], path + ".pose");
      cam.has_pose_literal = true;
    }
    if (v.contains("frame")) cam.frame = as_string(v["frame"], path + ".frame");
    return cam;
  }
};

}  // namespace

Config load_config(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ConfigError::Code::UnreadableFile, "cannot open " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(ConfigError::Code::TypeMismatch,
                      "config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) {
    throw ConfigError(ConfigError::Code::TypeMismatch, "config must be a JSON object");
  }

  ConfigReader reader;
  reader.warnings = warnings;
  reader.check_unknown(j,
                       {"mode", "pose_log_path", "map_image_path", "map_metadata_path",
                        "frame_count", "frame_rate", "objects", "camera", "output_dir", "writers",
                        "seed", "noise_sigma", "segmentation", "max_attempts"},
                       "");

  Config config;
  bool mode_known = false;
  if (!j.contains("mode")) {
    reader.missing.push_back("mode");
  } else {
    const std::string mode = as_string(j["mode"], "mode");
    if (mode == "replay") {
      config.mode = RunMode::Replay;
      mode_known = true;
    } else if (mode == "random") {
      config.mode = RunMode::Random;
      mode_known = true;
    } else {
      type_error("mode", "must be \"replay\" or \"random\"");
    }
  }

  if (!j.contains("output_dir")) {
    reader.missing.push_back("output_dir");
  } else {
    config.output_dir = as_string(j["output_dir"], "output_dir");
  }

  if (!j.contains("objects")) {
    reader.missing.push_back("objects");
  } else {
    const json& objs = j["objects"];
    if (!objs.is_array() || objs.empty()) type_error("objects", "expected a nonempty array");
    for (std::size_t i = 0; i < objs.size(); ++i) {
      config.objects.push_back(
          reader.parse_object(objs[i], "objects[" + std::to_string(i) + "]"));
    }
    std::set<std::string> names;
    for (const ObjectSpec& o : config.objects) {
      if (!o.name.empty() && !names.insert(o.name).second) {
        type_error("objects", "duplicate object name '" + o.name + "'");
      }
    }
  }

  if (!j.contains("camera")) {
    reader.missing.push_back("camera");
  } else {
    config.camera = reader.parse_camera(j["camera"], "camera");
  }

  if (!j.contains("writers")) {
    reader.missing.push_back("writers");
  } else {
    const json& writers = j["writers"];
    if (!writers.is_array() || writers.empty()) type_error("writers", "expected a nonempty array");
    for (std::size_t i = 0; i < writers.size(); ++i) {
      const std::string path_i = "writers[" + std::to_string(i) + "]";
      const json& w = writers[i];
      if (!w.is_object()) type_error(path_i, "expected an object");
      reader.check_unknown(w, {"kind", "dir"}, path_i);
      WriterSpec spec;
      if (!w.contains("kind")) {
        reader.missing.push_back(path_i + ".kind");
        continue;
      }
      spec.kind = as_string(w["kind"], path_i + ".kind");
      if (spec.kind != "darknet" && spec.kind != "coco" && spec.kind != "keypoints") {
        type_error(path_i + ".kind", "unknown writer kind '" + spec.kind + "'");
      }
      if (w.contains("dir")) spec.dir = as_string(w["dir"], path_i + ".dir");
      config.writers.push_back(std::move(spec));
    }
  }

  // Optional fields from the documented defaults table.
  if (j.contains("frame_rate")) {
    config.frame_rate = as_number(j["frame_rate"], "frame_rate");
    if (config.frame_rate <= 0) type_error("frame_rate", "must be > 0");
  } else {
    reader.warn_default("frame_rate", "10");
  }
  if (j.contains("seed")) {
    const json& seed = j["seed"];
    if (seed.is_number_unsigned()) {
      config.seed = seed.get<std::uint64_t>();
    } else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0) {
      config.seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
    } else {
      type_error("seed", "expected a nonnegative integer");
    }
  } else {
    reader.warn_default("seed", "0");
  }
  if (j.contains("noise_sigma")) {
    config.noise_sigma = as_number(j["noise_sigma"], "noise_sigma");
    if (config.noise_sigma < 0) type_error("noise_sigma", "must be >= 0");
  } else {
    reader.warn_default("noise_sigma", "0");
  }
  if (j.contains("max_attempts")) {
    config.max_attempts = as_int(j["max_attempts"], "max_attempts");
    if (config.max_attempts < 1) type_error("max_attempts", "must be >= 1");
  } else {
    reader.warn_default("max_attempts", "1000");
  }
  {
    const json seg = j.contains("segmentation") ? j["segmentation"] : json::object();
    if (!seg.is_object()) type_error("segmentation", "expected an object");
    reader.check_unknown(seg, {"num_bg_frames", "k", "tau", "visibility_masks"}, "segmentation");
    if (seg.contains("num_bg_frames")) {
      config.segmentation.num_bg_frames = as_int(seg["num_bg_frames"], "segmentation.num_bg_frames");
      if (config.segmentation.num_bg_frames < 1) {
        type_error("segmentation.num_bg_frames", "must be >= 1");
      }
    } else {
      reader.warn_default("segmentation.num_bg_frames", "10");
    }
    if (seg.contains("k")) {
      config.segmentation.subtractor.k = as_number(seg["k"], "segmentation.k");
    } else {
      reader.warn_default("segmentation.k", "9");
    }
    if (seg.contains("tau")) {
      config.segmentation.subtractor.tau = as_number(seg["tau"], "segmentation.tau");
    } else {
      reader.warn_default("segmentation.tau", "225");
    }
    if (seg.contains("visibility_masks")) {
      if (!seg["visibility_masks"].is_boolean()) {
        type_error("segmentation.visibility_masks", "expected a boolean");
      }
      config.segmentation.visibility_masks = seg["visibility_masks"].get<bool>();
    } else {
      reader.warn_default("segmentation.visibility_masks", "false");
    }
  }

  // Mode-specific requirements.
  if (mode_known && config.mode == RunMode::Replay) {
    if (!j.contains("pose_log_path")) {
      reader.missing.push_back("pose_log_path");
    } else {
      config.pose_log_path = as_string(j["pose_log_path"], "pose_log_path");
    }
    if (j.contains("camera") && !config.camera.has_pose_literal && !config.camera.frame) {
      reader.missing.push_back("camera.pose (or camera.frame)");
    }
  }
  if (mode_known && config.mode == RunMode::Random) {
    for (const char* key : {"map_image_path", "map_metadata_path", "frame_count"}) {
      if (!j.contains(key)) reader.missing.push_back(key);
    }
    if (j.contains("map_image_path")) {
      config.map_image_path = as_string(j["map_image_path"], "map_image_path");
    }
    if (j.contains("map_metadata_path")) {
      config.map_metadata_path = as_string(j["map_metadata_path"], "map_metadata_path");
    }
    if (j.contains("frame_count")) {
      config.frame_count = as_int(j["frame_count"], "frame_count");
      if (config.frame_count < 0) type_error("frame_count", "must be >= 0");
    }
    if (j.contains("camera") && !config.camera.has_pose_literal) {
      reader.missing.push_back("camera.pose");
    }
    for (std::size_t i = 0; i < config.objects.size(); ++i) {
      if (!config.objects[i].safety_radius) {
        reader.missing.push_back("objects[" + std::to_string(i) + "].safety_radius");
      }
    }
  }

  if (!reader.missing.empty()) {
    std::string msg = "config: missing required field(s):";
    for (const std::string& field : reader.missing) msg += " " + field;
    throw ConfigError(ConfigError::Code::MissingRequired, msg);
  }
  return config;
}

// ---------------------------------------------------------------------------
// Shared run machinery

namespace {

struct FramePlan {
  double time = 0.0;
  Transform camera_pose;
  std::vector<Transform> object_poses;  // world, one per config object
};

WriterRegistry build_writers(const Config& config) {
  WriterRegistry registry;
  const std::filesystem::path out(config.output_dir);
  for (const WriterSpec& spec : config.writers) {
    std::filesystem::path dir = spec.dir ? std::filesystem::path(*spec.dir)
                                         : std::filesystem::path(spec.kind);
    if (dir.is_relative()) dir = out / dir;
    if (spec.kind == "darknet") {
      registry.add(std::make_unique<DarknetWriter>(dir));
    } else if (spec.kind == "coco") {
      registry.add(std::make_unique<CocoWriter>(dir));
    } else {
      registry.add(std::make_unique<KeypointWriter>(dir));
    }
  }
  return registry;
}

class ProgressPrinter {
 public:
  ProgressPrinter(int total, const ProgressFn& fn) : total_(total), fn_(fn) {}

  void frame_done(int completed) {
    const int percent = total_ == 0 ? 100 : (completed * 100) / total_;
    if (percent >= last_ + 5 || (percent == 100 && last_ != 100)) emit(percent);
  }

  void finish() {
    if (last_ != 100) emit(100);
  }

 private:
  void emit(int percent) {
    last_ = percent;
    log_line(LogLevel::Info, "progress: " + std::to_string(percent) + "%");
    if (fn_) fn_(percent);
  }

  int total_;
  ProgressFn fn_;
  int last_ = -1;
};

// Seed streams per purpose so that adding one consumer never shifts another.
enum : std::uint64_t { kSeedFrame = 1, kSeedSolo = 2, kSeedBackground = 3 };

BackgroundModel train_scene_background(const Config& config, const CameraModel& cam,
                                       RenderCounters& counters) {
  std::vector<Frame> bg_frames;
  bg_frames.reserve(config.segmentation.num_bg_frames);
  const std::vector<RenderObject> empty;
  for (int i = 0; i < config.segmentation.num_bg_frames; ++i) {
    const RenderOptions options{config.noise_sigma,
                                mix_seed(mix_seed(config.seed, kSeedBackground), i)};
    bg_frames.push_back(render_scene(empty, cam, options));
  }
  return train_background(bg_frames, &counters);
}

template <typename Fn>
auto with_frame_context(int frame_index, double time, Fn&& fn) {
  const auto context = [&](const std::string& what) {
    return "frame " + std::to_string(frame_index) + " (t=" + std::to_string(time) + "): " + what;
  };
  try {
    return fn();
  } catch (const TimelineError& e) {
    throw TimelineError(e.code(), context(e.what()));
  } catch (const RenderError& e) {
    throw RenderError(e.code(), context(e.what()));
  } catch (const WriterError& e) {
    throw WriterError(e.code(), context(e.what()));
  } catch (const IoError& e) {
    throw IoError(context(e.what()));
  }
}

RunReport run_frames(const Config& config, const std::vector<FramePlan>& plans,
                     const ProgressFn& progress, const SnapshotFn& snapshot) {
  const auto t0 = std::chrono::steady_clock::now();

  const std::filesystem::path out(config.output_dir);
  const std::filesystem::path images_dir = out / "images";
  std::filesystem::create_directories(images_dir);

  WriterRegistry registry = build_writers(config);
  const bool segmentation = registry.any_requires_segmentation();
  const std::filesystem::path masks_dir = out / "masks";
  if (segmentation) std::filesystem::create_directories(masks_dir);

  RenderCounters counters;
  std::optional<BackgroundModel> background;

  ProgressPrinter reporter(static_cast<int>(plans.size()), progress);
  for (std::size_t frame_index = 0; frame_index < plans.size(); ++frame_index) {
    const FramePlan& plan = plans[frame_index];
    with_frame_context(static_cast<int>(frame_index), plan.time, [&] {
      CameraModel cam = config.camera.model;
      cam.pose = plan.camera_pose;

      std::vector<RenderObject> objects;
      objects.reserve(config.objects.size());
      for (std::size_t i = 0; i < config.objects.size(); ++i) {
        objects.push_back({config.objects[i].cuboid, plan.object_poses[i],
                           config.objects[i].class_id, true});
      }

      // The background depends only on camera intrinsics and the noise
      // settings; train it once, lazily, so runs without segmentation never
      // touch the subtractor. Visibility-mask mode bypasses it entirely.
      if (segmentation && !config.segmentation.visibility_masks && !background) {
        background = train_scene_background(config, cam, counters);
      }

      const RenderOptions frame_options{
          config.noise_sigma, mix_seed(mix_seed(config.seed, kSeedFrame), frame_index)};
      Frame frame = render_scene(objects, cam, frame_options);
      const std::filesystem::path image_path =
          images_dir / frame_filename(static_cast<int>(frame_index));
      write_ppm(image_path, frame);

      std::vector<Mask> masks;
      if (segmentation) {
        if (config.segmentation.visibility_masks) {
          masks = visibility_object_masks(objects, cam);
        } else {
          const RenderOptions solo_options{
              config.noise_sigma, mix_seed(mix_seed(config.seed, kSeedSolo), frame_index)};
          masks = isolated_object_masks(objects, cam, *background,
                                        config.segmentation.subtractor, solo_options, &counters);
        }
        for (std::size_t i = 0; i < masks.size(); ++i) {
          write_mask_pgm(masks_dir / mask_filename(static_cast<int>(frame_index),
                                                   static_cast<int>(i)),
                         masks[i]);
        }
      }

      const Transform cam_from_world = inverse(cam.pose);
      LabelInputs inputs;
      inputs.frame_index = static_cast<int>(frame_index);
      inputs.image_path = std::filesystem::absolute(image_path).lexically_normal().string();
      inputs.image_width = cam.width;
      inputs.image_height = cam.height;

      std::vector<std::vector<std::optional<Vec2>>> all_vertices;
      std::vector<std::vector<std::optional<Vec2>>> all_keypoints;
      for (std::size_t i = 0; i < objects.size(); ++i) {
        const Transform pose_in_cam = compose(cam_from_world, objects[i].world_pose);
        ObjectLabel label;
        label.class_id = config.objects[i].class_id;
        label.name = config.objects[i].name;
        label.rect = project_cuboid_to_rect(cam, config.objects[i].cuboid, pose_in_cam);
        if (label.rect) {
          label.box = darknet_normalize(*label.rect, label.class_id, cam.width, cam.height);
        }
        for (const Vec3& v : cuboid_vertices(config.objects[i].cuboid)) {
          label.cuboid_vertices.push_back(project_point(cam, pose_in_cam.apply(v)));
        }
        for (const Vec3& kp : config.objects[i].keypoints) {
          label.keypoints.push_back(project_point(cam, pose_in_cam.apply(kp)));
        }
        if (segmentation) label.mask = &masks[i];
        all_vertices.push_back(label.cuboid_vertices);
        all_keypoints.push_back(label.keypoints);
        inputs.objects.push_back(std::move(label));
      }

      registry.write_scene(inputs);

      if (snapshot) {
        SceneSnapshot snap;
        snap.time = plan.time;
        snap.objects = objects;
        snap.camera = cam;
        snap.frame = std::move(frame);
        snap.masks = std::move(masks);
        snap.projected_vertices = std::move(all_vertices);
        snap.projected_keypoints = std::move(all_keypoints);
        snapshot(snap);
      }
    });
    reporter.frame_done(static_cast<int>(frame_index) + 1);
  }

  registry.finalize();
  reporter.finish();

  RunReport report;
  report.frames = static_cast<int>(plans.size());
  for (std::size_t i = 0; i < registry.size(); ++i) {
    report.writer_files.emplace_back(registry.at(i).name(), registry.at(i).files_written());
  }
  report.subtractor_invocations = counters.train_calls + counters.subtract_calls;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// The CLI can override the mode after load_config validated the other one.
void require_replay_fields(const Config& config) {
  if (config.pose_log_path.empty()) {
    throw ConfigError(ConfigError::Code::MissingRequired,
                      "config: missing required field(s): pose_log_path");
  }
  if (!config.camera.has_pose_literal && !config.camera.frame) {
    throw ConfigError(ConfigError::Code::MissingRequired,
                      "config: missing required field(s): camera.pose (or camera.frame)");
  }
}

void require_random_fields(const Config& config) {
  std::vector<std::string> missing;
  if (config.map_image_path.empty()) missing.push_back("map_image_path");
  if (config.map_metadata_path.empty()) missing.push_back("map_metadata_path");
  if (!config.camera.has_pose_literal) missing.push_back("camera.pose");
  for (std::size_t i = 0; i < config.objects.size(); ++i) {
    if (!config.objects[i].safety_radius) {
      missing.push_back("objects[" + std::to_string(i) + "].safety_radius");
    }
  }
  if (!missing.empty()) {
    std::string msg = "config: missing required field(s):";
    for (const std::string& field : missing) msg += " " + field;
    throw ConfigError(ConfigError::Code::MissingRequired, msg);
  }
}

std::vector<FramePlan> plan_replay(const Config& config) {
  require_replay_fields(config);
  const TransformTree tree = load_pose_log_file(config.pose_log_path);

  // The camera literal wins over a logged camera frame when both exist.
  const bool camera_from_tree = !config.camera.has_pose_literal && config.camera.frame.has_value();

  std::vector<std::string> required;
  for (const ObjectSpec& obj : config.objects) required.push_back(obj.name);
  if (camera_from_tree) required.push_back(*config.camera.frame);

  const TimeRange range = valid_time_range(tree, required);
  const std::vector<double> times =
      sample_times({range.start, range.end, config.frame_rate});

  const std::string root = tree.root_of(required.front());
  std::vector<FramePlan> plans;
  plans.reserve(times.size());
  for (const double t : times) {
    FramePlan plan;
    plan.time = t;
    plan.camera_pose = camera_from_tree ? lookup_transform(tree, root, *config.camera.frame, t)
                                        : config.camera.model.pose;
    for (const ObjectSpec& obj : config.objects) {
      plan.object_poses.push_back(lookup_transform(tree, root, obj.name, t));
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

void mark_disc_occupied(GridMap& map, Cell center, int radius_cells) {
  const long r2 = static_cast<long>(radius_cells) * radius_cells;
  for (int dy = -radius_cells; dy <= radius_cells; ++dy) {
    for (int dx = -radius_cells; dx <= radius_cells; ++dx) {
      if (static_cast<long>(dx) * dx + static_cast<long>(dy) * dy > r2) continue;
      const Cell c{center.col + dx, center.row + dy};
      if (map.in_bounds(c)) map.at(c) = Occupancy::Occupied;
    }
  }
}

std::vector<FramePlan> plan_random(const Config& config) {
  require_random_fields(config);
  const MapMetadata meta = load_map_metadata(config.map_metadata_path);
  MapMetadata effective = meta;
  effective.image_path = config.map_image_path;
  const GridMap base_map = load_map(effective, load_pgm_file(config.map_image_path));

  SamplerState state(config.seed, config.max_attempts);
  std::vector<FramePlan> plans;
  plans.reserve(config.frame_count);
  for (int frame = 0; frame < config.frame_count; ++frame) {
    GridMap scratch = base_map;
    FramePlan plan;
    plan.time = frame;
    plan.camera_pose = config.camera.model.pose;
    for (const ObjectSpec& obj : config.objects) {
      const FootprintSpec footprint{*obj.safety_radius};
      Pose2D pose;
      try {
        pose = sample_pose(scratch, footprint, state);
      } catch (const SamplerError& e) {
        throw SamplerError(e.code(),
                           "datapoint " + std::to_string(frame) + ", object '" + obj.name +
                               "': " + e.what(),
                           e.attempts());
      }
      const auto cell = world_to_cell(scratch, {pose.x, pose.y});
      mark_disc_occupied(scratch, *cell, radius_in_cells(footprint, scratch.resolution));
      plan.object_poses.push_back(
          {{pose.x, pose.y, 0.0}, quat_from_yaw(pose.theta)});
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace

RunReport run_replay(const Config& config, const ProgressFn& progress,
                     const SnapshotFn& snapshot) {
  return run_frames(config, plan_replay(config), progress, snapshot);
}

RunReport run_random(const Config& config, const ProgressFn& progress,
                     const SnapshotFn& snapshot) {
  return run_frames(config, plan_random(config), progress, snapshot);
}

RunReport run(const Config& config, const ProgressFn& progress, const SnapshotFn& snapshot) {
  return config.mode == RunMode::Replay ? run_replay(config, progress, snapshot)
                                        : run_random(config, progress, snapshot);
}

int planned_frame_count(const Config& config) {
  if (config.mode == RunMode::Random) {
    require_random_fields(config);
    const MapMetadata meta = load_map_metadata(config.map_metadata_path);
    MapMetadata effective = meta;
    effective.image_path = config.map_image_path;
    load_map(effective, load_pgm_file(config.map_image_path));  // validate only
    return config.frame_count;
  }
  require_replay_fields(config);
  const TransformTree tree = load_pose_log_file(config.pose_log_path);
  const bool camera_from_tree = !config.camera.has_pose_literal && config.camera.frame.has_value();
  std::vector<std::string> required;
  for (const ObjectSpec& obj : config.objects) required.push_back(obj.name);
  if (camera_from_tree) required.push_back(*config.camera.frame);
  const TimeRange range = valid_time_range(tree, required);
  return static_cast<int>(sample_times({range.start, range.end, config.frame_rate}).size());
}

}  // namespace synth
