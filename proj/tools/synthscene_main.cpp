#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "synthscene/format_writers.hpp"
#include "synthscene/image_io.hpp"
#include "synthscene/log.hpp"
#include "synthscene/occupancy_map.hpp"
#include "synthscene/pipeline.hpp"
#include "synthscene/pose_sampler.hpp"
#include "synthscene/scene_timeline.hpp"

namespace {

// Exit codes: 0 ok, 2 config error, 3 input parse error, 4 generation error,
// 1 anything else.
int run_cli(int argc, char** argv) {
  CLI::App app{"synthscene - synthetic labeled image dataset generator"};

  std::string config_path;
  std::optional<std::string> mode;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;

  app.add_option("--config", config_path, "Path to the JSON configuration")->required();
  app.add_option("--mode", mode, "Override mode (replay|random)")
      ->check(CLI::IsMember({"replay", "random"}));
  app.add_option("--output", output, "Override output directory");
  app.add_option("--seed", seed, "Override RNG seed");
  app.add_flag("--dry-run", dry_run,
               "Validate the configuration and inputs, print the frame count, write nothing");

  CLI11_PARSE(app, argc, argv);

  synth::Config config = synth::load_config(config_path);
  if (mode) config.mode = (*mode == "replay") ? synth::RunMode::Replay : synth::RunMode::Random;
  if (output) config.output_dir = *output;
  if (seed) config.seed = *seed;

  if (dry_run) {
    std::cout << synth::planned_frame_count(config) << "\n";
    return 0;
  }

  const synth::RunReport report = synth::run(config);
  synth::log_line(synth::LogLevel::Info,
                  "generated " + std::to_string(report.frames) + " frames in " +
                      std::to_string(report.wall_seconds) + " s (subtractor invocations: " +
                      std::to_string(report.subtractor_invocations) + ")");
  for (const auto& [name, files] : report.writer_files) {
    synth::log_line(synth::LogLevel::Info,
                    "writer " + name + ": " + std::to_string(files) + " files");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const synth::ConfigError& e) {
    synth::log_line(synth::LogLevel::Error, e.what());
    return 2;
  } catch (const synth::MapError& e) {
    synth::log_line(synth::LogLevel::Error, e.what());
    return 3;
  } catch (const synth::TimelineError& e) {
    synth::log_line(synth::LogLevel::Error, e.what());
    return 3;
  } catch (const synth::SamplerError& e) {
    synth::log_line(synth::LogLevel::Error, e.what());
    return 4;
  } catch (const synth::RenderError& e) {
    synth::log_line(synth::LogLevel::Error, e.what());
    return 4;
  } catch (const synth::WriterError& e) {
    synth::log_line(synth::LogLevel::Error, e.what());
    return 4;
  } catch (const synth::IoError& e) {
    synth::log_line(synth::LogLevel::Error, e.what());
    return 4;
  } catch (const std::exception& e) {
    synth::log_line(synth::LogLevel::Error, e.what());
    return 1;
  }
}
