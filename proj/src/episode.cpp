#include "reaper/episode.hpp"

#include <algorithm>
#include <cmath>

#include "reaper/error.hpp"

namespace reaper {

const char* to_string(DriveMode m) { return m == DriveMode::Planned ? "planned" : "vision"; }

void EpisodeConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); };
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(cruise_speed > 0.0) || !(turn_speed > 0.0)) fail("speeds must be positive");
  if (cruise_speed > vehicle.v_max || turn_speed > vehicle.v_max) fail("speeds must not exceed v_max");
  if (!(lookahead > 0.0)) fail("lookahead must be positive");
  if (!(approach >= 0.0) || !(overrun >= 0.0)) fail("approach and overrun must be >= 0");
  if (!(rho > 0.0 && rho < 1.0)) fail("rho must be in (0,1)");
  if (k < 1) fail("k must be >= 1");
  if (max_ticks < 1) fail("max_ticks must be >= 1");
  if (!(bar.width > 0.0)) fail("bar width must be positive");
  if (!(vehicle.wheelbase > 0.0) || !(vehicle.max_angle > 0.0) || !(vehicle.v_max > 0.0)) {
    fail("vehicle wheelbase, max_angle and v_max must be positive");
  }
  if (!(vehicle.deadband >= 0.0 && vehicle.deadband < 1.0)) fail("deadband must be in [0,1)");
  if (vision_steer_index < 0 || vision_steer_index > SteeringIndex::kMax) fail("vision_steer_index must be in 0..3");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  if (steering.v_left == steering.v_right) fail("steering calibration endpoints must differ");
  seg.validate();
  try {
    camera.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

namespace {

struct PathPoint {
  Vec2 p;
  double s = 0.0;
  int pass = -1;
};

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }

class Path {
 public:
  static constexpr double kSpacing = 0.02;

  void add_point(Vec2 p, int pass) {
    double s = 0.0;
    if (!pts_.empty()) {
      const double step = norm(p - pts_.back().p);
      if (step < 1e-9) return;
      s = pts_.back().s + step;
    }
    pts_.push_back({p, s, pass});
  }

  void add_line(Vec2 a, Vec2 b, int pass) {
    const int n = std::max(1, static_cast<int>(std::ceil(norm(b - a) / kSpacing)));
    if (pts_.empty()) add_point(a, pass);
    for (int i = 1; i <= n; ++i) add_point(a + (static_cast<double>(i) / n) * (b - a), pass);
  }

  void add_arc(Vec2 center, double radius, double theta0, double sweep, int pass) {
    const int n = std::max(2, static_cast<int>(std::ceil(std::abs(sweep) * radius / kSpacing)));
    for (int i = 1; i <= n; ++i) {
      const double th = theta0 + sweep * i / n;
      add_point(center + radius * Vec2{std::cos(th), std::sin(th)}, pass);
    }
  }

  bool empty() const { return pts_.empty(); }
  double length() const { return pts_.empty() ? 0.0 : pts_.back().s; }

  double nearest(Vec2 q, double s_lo, double s_hi) const {
    double best_s = s_lo, best_d = 1e300;
    auto it = std::lower_bound(pts_.begin(), pts_.end(), s_lo, [](const PathPoint& a, double s) { return a.s < s; });
    for (; it != pts_.end() && it->s <= s_hi; ++it) {
      const double d = norm(it->p - q);
      if (d < best_d) {
        best_d = d;
        best_s = it->s;
      }
    }
    return best_s;
  }

  const PathPoint& at(double s) const {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), s, [](const PathPoint& a, double v) { return a.s < v; });
    return it == pts_.end() ? pts_.back() : *it;
  }

 private:
  std::vector<PathPoint> pts_;
};

Vec2 unit(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? (1.0 / n) * a : Vec2{1.0, 0.0};
}

void add_connector(Path& path, Vec2 from, Vec2 dir_from, Vec2 to, Vec2 dir_to) {
  const Vec2 delta = to - from;
  const double along = dot(delta, dir_from);
  const Vec2 lateral = delta - along * dir_from;
  const double gap = norm(lateral);
  if (dot(dir_from, dir_to) < -0.99 && gap > 1e-6) {
    // U-turn: run out to the later of the two lane ends, then a half circle.
    const Vec2 t1 = from + std::max(0.0, along) * dir_from;
    const Vec2 t2 = t1 + lateral;
    const Vec2 center = t1 + 0.5 * lateral;
    const double radius = gap / 2.0;
    path.add_line(from, t1, -1);
    const double theta0 = std::atan2(t1.y - center.y, t1.x - center.x);
    const double apex = std::atan2(dir_from.y, dir_from.x);
    const double sweep = std::remainder(apex - theta0, 2.0 * M_PI) >= 0.0 ? M_PI : -M_PI;
    path.add_arc(center, radius, theta0, sweep, -1);
    path.add_line(t2, to, -1);
  } else {
    path.add_line(from, to, -1);
  }
}

struct PassSpan {
  double s_start = 0.0;
  double s_end = 0.0;
};

Path build_path(const CoveragePlan& plan, Vec2 start, const EpisodeConfig& cfg, std::vector<PassSpan>& spans) {
  Path path;
  path.add_point(start, -1);
  Vec2 prev_end = start, prev_dir{};
  for (std::size_t k = 0; k < plan.passes.size(); ++k) {
    const auto& pass = plan.passes[k];
    const Vec2 d = unit(pass.end - pass.start);
    const Vec2 ps = pass.start - (cfg.approach + cfg.bar.offset) * d;
    const Vec2 pe = pass.end + (cfg.overrun - cfg.bar.offset) * d;
    if (k == 0) {
      path.add_line(start, ps, -1);
    } else {
      add_connector(path, prev_end, prev_dir, ps, d);
    }
    PassSpan span;
    span.s_start = path.length();
    path.add_line(ps, pe, static_cast<int>(k));
    span.s_end = path.length();
    spans.push_back(span);
    prev_end = pe;
    prev_dir = d;
  }
  return path;
}

int steer_to_index(double delta, const EpisodeConfig& cfg) {
  const double pos = std::clamp(delta / cfg.vehicle.max_angle * SteeringIndex::kMax, -3.0, 3.0);
  return encoder_to_index(index_to_voltage(pos, cfg.steering), cfg.steering).index;
}

BinaryMask material_mask(const Raster<Material>& m, Material which) {
  BinaryMask out(m.width(), m.height());
  std::transform(m.data().begin(), m.data().end(), out.data().begin(),
                 [which](Material x) { return static_cast<std::uint8_t>(x == which); });
  return out;
}

}  // namespace

EpisodeReport run_episode(const EpisodeConfig& config, const FrameSink& sink) {
  config.validate();
  return run_episode(config, generate_field(config.field), sink);
}

EpisodeReport run_episode(const EpisodeConfig& cfg, FieldGrid field, const FrameSink& sink) {
  cfg.validate();
  EpisodeReport rep;
  rep.initial_standing = field.count(Cell::StandingCrop);
  if (rep.initial_standing == 0) {
    rep.stop_reason = "no_crop";
    rep.coverage_fraction = 1.0;
    if (cfg.start) rep.final_pose = *cfg.start;
    return rep;
  }

  const int swath = std::max(1, static_cast<int>(std::floor(cfg.bar.width / field.cell_size + 1e-9)));
  std::optional<Vec2> start_xy;
  if (cfg.start) start_xy = Vec2{cfg.start->x, cfg.start->y};
  CoveragePlan plan;
  if (cfg.mode == DriveMode::Planned) {
    plan = plan_coverage(field, swath, start_xy);
    rep.planned_passes = static_cast<int>(plan.passes.size());
  }

  VehiclePose pose;
  if (cfg.start) {
    pose = *cfg.start;
  } else if (!plan.passes.empty()) {
    const auto& first = plan.passes.front();
    const Vec2 d = unit(first.end - first.start);
    const Vec2 p = first.start - (cfg.approach + cfg.bar.offset) * d;
    pose = {p.x, p.y, std::atan2(d.y, d.x), 0.0};
  } else {
    throw Error(ErrorCode::ConfigInvalid, "vision mode needs a start pose");
  }

  std::vector<PassSpan> spans;
  Path path;
  if (cfg.mode == DriveMode::Planned) path = build_path(plan, {pose.x, pose.y}, cfg, spans);

  SeparationMonitor detector(cfg.rho, cfg.k);
  SeparationMonitor truth(cfg.rho, 1);
  PidState speed_state;
  speed_state.integral_limit = cfg.speed_integral_limit;
  std::vector<int> footprint;
  double progress = 0.0;
  int active_pass = -1;
  const double ff_scale = (1.0 - cfg.vehicle.deadband) / cfg.vehicle.v_max;

  // The bar is down from the first tick.
  {
    const CutResult cut = apply_cut(field, pose, cfg.bar, &footprint);
    rep.laid_crop_traversals += cut.traversals;
  }

  auto finish = [&](const std::string& reason) {
    rep.stop_reason = reason;
    rep.final_pose = pose;
  };

  for (int tick = 0;; ++tick) {
    const std::size_t standing = field.count(Cell::StandingCrop);
    rep.harvested = rep.initial_standing - standing;
    if (standing == 0) {
      finish("coverage_complete");
      break;
    }
    if (tick >= cfg.max_ticks) {
      finish("tick_budget");
      break;
    }

    TickLog log;
    log.tick = tick;
    log.t = tick * cfg.dt;

    RenderOptions ropt;
    ropt.noise_sigma = cfg.noise_sigma;
    ropt.noise_seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(tick);
    const RenderedFrame frame = render_frame(field, pose, cfg.camera, ropt);
    const SegmentationResult seg = run_pipeline(frame.image, cfg.seg);
    const auto ctr = centroid(seg.vertical);
    log.action = region_decision(ctr ? std::optional<double>(ctr->col) : std::nullopt, frame.image.width()).action;

    int steer = 0;
    double target_speed = cfg.cruise_speed;
    if (cfg.mode == DriveMode::Planned) {
      const Vec2 here{pose.x, pose.y};
      progress = std::max(progress, path.nearest(here, progress - 0.1, progress + 0.6));
      if (progress >= path.length() - 1e-9) {
        finish("plan_complete");
        break;
      }
      const PathPoint& cur = path.at(progress);
      log.pass = cur.pass;
      const Vec2 target = path.at(progress + cfg.lookahead).p;
      const Vec2 to = target - here;
      const double alpha = std::remainder(std::atan2(to.y, to.x) - pose.heading, 2.0 * M_PI);
      const double delta = std::atan2(2.0 * cfg.vehicle.wheelbase * std::sin(alpha), std::max(norm(to), 1e-6));
      steer = steer_to_index(delta, cfg);
      target_speed = cur.pass >= 0 ? cfg.cruise_speed : cfg.turn_speed;
    } else {
      log.pass = 0;
      switch (log.action) {
        case NavAction::SteerLeft: steer = -cfg.vision_steer_index; break;
        case NavAction::SteerRight: steer = cfg.vision_steer_index; break;
        default: steer = 0; break;
      }
    }

    if (log.pass != active_pass) {
      detector.reset();
      truth.reset();
      active_pass = log.pass;
    }
    if (log.pass >= 0) {
      const bool truth_fired = truth.push(crop_roof(material_mask(frame.materials, Material::StandingCrop)));
      log.separation = detector.push(crop_roof(seg.vertical));
      log.roof_median = detector.last_median();
      if (truth_fired) rep.separations.push_back({log.pass, tick, -1});
      if (log.separation) {
        log.action = NavAction::TurnAtSeparation;
        auto it = std::find_if(rep.separations.begin(), rep.separations.end(), [&](const SeparationEvent& e) {
          return e.pass == log.pass && e.detected_frame < 0 && e.onset_frame <= tick;
        });
        if (it != rep.separations.end()) {
          it->detected_frame = tick;
        } else {
          ++rep.unmatched_detections;
        }
      }
    }

    const double error = target_speed - pose.speed;
    const PidOutput pid = pid_step(speed_state, cfg.speed_pid, error, cfg.dt);
    speed_state = pid.state;
    const double duty =
        std::clamp(target_speed > 0.0 ? cfg.vehicle.deadband + target_speed * ff_scale + pid.u : 0.0, 0.0, 1.0);
    log.speed_error = error;
    log.pid_u = pid.u;
    log.steering_index = steer;
    log.duty = duty;

    const bool vision_stop = cfg.mode == DriveMode::Vision && log.action == NavAction::Stop;
    const VehiclePose next = step_vehicle(pose, {steer}, duty, cfg.dt, cfg.vehicle);
    const bool fence_stop = cfg.geofence_enabled && !field.inside_fence({next.x, next.y});
    if (fence_stop) log.action = NavAction::Stop;
    if (!vision_stop && !fence_stop) {
      pose = next;
      const CutResult cut = apply_cut(field, pose, cfg.bar, &footprint);
      rep.laid_crop_traversals += cut.traversals;
      if (!field.inside_fence({pose.x, pose.y})) ++rep.fence_violations;
    } else {
      pose.speed = 0.0;
    }
    log.pose = pose;
    rep.frames = tick + 1;
    rep.decisions.push_back(log);
    if (sink) sink({frame, seg, rep.decisions.back()});
    if (fence_stop) {
      finish("geofence");
      break;
    }
    if (vision_stop) {
      finish("vision_stop");
      break;
    }
  }

  rep.harvested = rep.initial_standing - field.count(Cell::StandingCrop);
  rep.coverage_fraction = static_cast<double>(rep.harvested) / static_cast<double>(rep.initial_standing);
  return rep;
}

EpisodeConfig two_plot_fixture() {
  EpisodeConfig cfg;
  auto& f = cfg.field;
  f.rows = 40;
  f.cols = 60;
  f.cell_size = 0.25;
  // margin 1, headland 7, plot 16, gap 12, plot 16, headland 7, margin 1
  f.crop = {2, 8, 36, 44};
  f.plot_count = 2;
  f.plot_gap = 12;
  f.split = SplitAxis::Columns;
  f.trees = {{0, 57, 1, 2}};
  f.fence_inset = 1;
  f.seed = 7;
  cfg.camera.width = 160;
  cfg.camera.height = 120;
  cfg.camera.focal = 100.0;
  cfg.start = VehiclePose{0.8, 1.0, 0.0, 0.0};
  return cfg;
}

EpisodeConfig strip_fixture() {
  EpisodeConfig cfg;
  auto& f = cfg.field;
  f.rows = 12;
  f.cols = 40;
  f.crop = {4, 8, 4, 24};
  f.seed = 7;
  cfg.camera.width = 160;
  cfg.camera.height = 120;
  cfg.camera.focal = 100.0;
  cfg.start = VehiclePose{0.8, 1.5, 0.0, 0.0};
  return cfg;
}

}  // namespace reaper
