#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reaper/control.hpp"
#include "reaper/fieldsim.hpp"
#include "reaper/navigation.hpp"
#include "reaper/segmentation.hpp"

namespace reaper {

// Planned: a pure-pursuit tracker follows the coverage plan and vision
// decisions are logged. Vision: the tri-region decision steers directly.
enum class DriveMode { Planned, Vision };

const char* to_string(DriveMode m);

struct EpisodeConfig {
  FieldSpec field;
  CameraModel camera;
  VehicleParams vehicle;
  CuttingBar bar;
  SegParams seg;
  SteeringCalibration steering;
  PidGains speed_pid{0.2, 2.0, 0.0};
  double speed_integral_limit = 0.5;
  DriveMode mode = DriveMode::Planned;
  double dt = 0.1;
  double cruise_speed = 0.7;
  double turn_speed = 0.5;
  double lookahead = 0.5;
  // Straight run-in before a lane and run-out after it, measured at the bar.
  double approach = 0.4;
  double overrun = 0.5;
  double rho = 0.4;
  int k = 3;
  // Index used in vision mode for SteerLeft/SteerRight.
  int vision_steer_index = 1;
  bool geofence_enabled = true;
  int max_ticks = 6000;
  std::optional<VehiclePose> start;
  double noise_sigma = 0.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct TickLog {
  int tick = 0;
  double t = 0.0;
  VehiclePose pose;
  NavAction action = NavAction::Straight;
  int steering_index = 0;
  double duty = 0.0;
  double speed_error = 0.0;
  double pid_u = 0.0;
  double roof_median = 0.0;
  bool separation = false;
  // Plan pass being executed, -1 during transits.
  int pass = -1;
};

struct SeparationEvent {
  int pass = -1;
  int onset_frame = -1;
  int detected_frame = -1;

  int latency() const { return detected_frame < 0 ? -1 : detected_frame - onset_frame; }
};

struct EpisodeReport {
  int frames = 0;
  std::size_t initial_standing = 0;
  std::size_t harvested = 0;
  double coverage_fraction = 1.0;
  int fence_violations = 0;
  int laid_crop_traversals = 0;
  std::string stop_reason;
  VehiclePose final_pose;
  int planned_passes = 0;
  std::vector<SeparationEvent> separations;
  int unmatched_detections = 0;
  std::vector<TickLog> decisions;
};

struct FrameRecord {
  const RenderedFrame& frame;
  const SegmentationResult& seg;
  const TickLog& log;
};

using FrameSink = std::function<void(const FrameRecord&)>;

EpisodeReport run_episode(const EpisodeConfig& config, const FrameSink& sink = {});
// Runs on a prepared grid instead of generating one from config.field.
EpisodeReport run_episode(const EpisodeConfig& config, FieldGrid field, const FrameSink& sink = {});

// 40 x 60 cells at 0.25 m: two 36 x 16 plots split by a 12-column gap, a tree
// outside the fence, and the start pose on the left headland.
EpisodeConfig two_plot_fixture();

// 12 x 40 cells with a single 4-row crop strip.
EpisodeConfig strip_fixture();

}  // namespace reaper
