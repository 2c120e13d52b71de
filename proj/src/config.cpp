#include "reaper/config.hpp"

#include <cmath>
#include <set>

#include "reaper/error.hpp"

namespace reaper {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigInvalid, path + ": " + msg);
}

constexpr double kDeg = M_PI / 180.0;

// Walks one JSON object, type-checking known keys and rejecting the rest.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  void num(const char* key, double& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number()) invalid(at(key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) invalid(at(key), "must be finite");
  }

  void deg(const char* key, double& out_rad) {
    double d = out_rad / kDeg;
    num(key, d);
    out_rad = d * kDeg;
  }

  void integer(const char* key, int& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) invalid(at(key), "expected an integer");
    out = v.get<int>();
  }

  void u64(const char* key, std::uint64_t& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned()) invalid(at(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(const char* key, bool& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) invalid(at(key), "expected true or false");
    out = v.get<bool>();
  }

  bool str(const char* key, std::string& out) {
    if (!has(key)) return false;
    const Json& v = j_.at(key);
    if (!v.is_string()) invalid(at(key), "expected a string");
    out = v.get<std::string>();
    return true;
  }

  const Json* child(const char* key) { return has(key) ? &j_.at(key) : nullptr; }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(at(it.key()), "unknown key");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

CellRect rect_from_json(const Json& j, const std::string& path) {
  CellRect r;
  Reader rd(j, path);
  rd.integer("row", r.row);
  rd.integer("col", r.col);
  rd.integer("rows", r.rows);
  rd.integer("cols", r.cols);
  rd.finish();
  if (r.rows < 0 || r.cols < 0) invalid(path, "rows and cols must be >= 0");
  return r;
}

std::vector<CellRect> rects_from_json(const Json* j, const std::string& path, std::vector<CellRect> base) {
  if (!j) return base;
  if (!j->is_array()) invalid(path, "expected an array");
  std::vector<CellRect> out;
  for (std::size_t i = 0; i < j->size(); ++i) out.push_back(rect_from_json((*j)[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Json rect_to_json(const CellRect& r) { return {{"row", r.row}, {"col", r.col}, {"rows", r.rows}, {"cols", r.cols}}; }

Json rects_to_json(const std::vector<CellRect>& v) {
  Json a = Json::array();
  for (const auto& r : v) a.push_back(rect_to_json(r));
  return a;
}

GeoPolygon polygon_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array of [lat, lon] pairs");
  GeoPolygon p;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& v = j[i];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      invalid(path + "[" + std::to_string(i) + "]", "expected [lat, lon]");
    }
    p.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return p;
}

}  // namespace

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, what + ": " + e.what());
  }
}

SegParams seg_params_from_json(const Json& j, SegParams p) {
  Reader rd(j, "segmentation");
  std::string mode;
  if (rd.str("mode", mode)) {
    if (mode == "prose") {
      p.mode = SegMode::Prose;
    } else if (mode == "appendix") {
      p.mode = SegMode::Appendix;
    } else {
      invalid("segmentation.mode", "expected \"prose\" or \"appendix\"");
    }
  }
  rd.num("phi1", p.phi1);
  rd.num("phi2", p.phi2);
  rd.num("plane_a", p.plane_a);
  rd.num("plane_b", p.plane_b);
  rd.boolean("plane_keep_below", p.plane_keep_below);
  rd.num("lum_threshold", p.lum_threshold);
  rd.integer("line_length", p.line_length);
  if (const Json* t = rd.child("tilts")) {
    if (!t->is_array()) invalid("segmentation.tilts", "expected an array of degrees");
    p.tilts.clear();
    for (const auto& v : *t) {
      if (!v.is_number()) invalid("segmentation.tilts", "expected numbers");
      p.tilts.push_back(v.get<double>());
    }
  }
  rd.finish();
  p.validate();
  return p;
}

Json to_json(const SegParams& p) {
  return {{"mode", p.mode == SegMode::Prose ? "prose" : "appendix"},
          {"phi1", p.phi1},
          {"phi2", p.phi2},
          {"plane_a", p.plane_a},
          {"plane_b", p.plane_b},
          {"plane_keep_below", p.plane_keep_below},
          {"lum_threshold", p.lum_threshold},
          {"line_length", p.line_length},
          {"tilts", p.tilts}};
}

GlcmSegParams glcm_params_from_json(const Json& j, GlcmSegParams p) {
  Reader rd(j, "glcm");
  rd.integer("tile", p.tile);
  rd.integer("levels", p.levels);
  rd.integer("drow", p.drow);
  rd.integer("dcol", p.dcol);
  std::string prop;
  if (rd.str("property", prop)) {
    if (prop == "contrast") {
      p.property = GlcmProperty::Contrast;
    } else if (prop == "correlation") {
      p.property = GlcmProperty::Correlation;
    } else if (prop == "energy") {
      p.property = GlcmProperty::Energy;
    } else if (prop == "homogeneity") {
      p.property = GlcmProperty::Homogeneity;
    } else {
      invalid("glcm.property", "unknown property \"" + prop + "\"");
    }
  }
  rd.num("threshold", p.threshold);
  rd.boolean("below", p.below);
  rd.finish();
  if (p.tile < 2 || p.levels < 2) invalid("glcm", "tile and levels must be >= 2");
  return p;
}

EpisodeConfig episode_config_from_json(const Json& j) {
  Reader rd(j, "config");
  std::string fixture = "two_plot";
  rd.str("fixture", fixture);
  EpisodeConfig c;
  if (fixture == "two_plot") {
    c = two_plot_fixture();
  } else if (fixture == "strip") {
    c = strip_fixture();
  } else if (fixture != "default") {
    invalid("config.fixture", "expected \"two_plot\", \"strip\" or \"default\"");
  }

  if (const Json* fj = rd.child("field")) {
    Reader f(*fj, "config.field");
    auto& s = c.field;
    f.integer("rows", s.rows);
    f.integer("cols", s.cols);
    f.num("cell_size", s.cell_size);
    if (const Json* cj = f.child("crop")) s.crop = rect_from_json(*cj, "config.field.crop");
    f.integer("plot_count", s.plot_count);
    f.integer("plot_gap", s.plot_gap);
    std::string split;
    if (f.str("split", split)) {
      if (split == "columns") {
        s.split = SplitAxis::Columns;
      } else if (split == "rows") {
        s.split = SplitAxis::Rows;
      } else {
        invalid("config.field.split", "expected \"columns\" or \"rows\"");
      }
    }
    s.residue = rects_from_json(f.child("residue"), "config.field.residue", s.residue);
    s.laid = rects_from_json(f.child("laid"), "config.field.laid", s.laid);
    s.trees = rects_from_json(f.child("trees"), "config.field.trees", s.trees);
    s.shrubs = rects_from_json(f.child("shrubs"), "config.field.shrubs", s.shrubs);
    if (const Json* fence = f.child("fence")) s.fence = polygon_from_json(*fence, "config.field.fence");
    f.integer("fence_inset", s.fence_inset);
    f.num("crop_height", s.crop_height);
    f.num("height_jitter", s.height_jitter);
    f.u64("seed", s.seed);
    f.finish();
    if (s.rows < 1 || s.cols < 1) invalid("config.field", "rows and cols must be >= 1");
    if (!(s.cell_size > 0.0)) invalid("config.field.cell_size", "must be positive");
    if (s.plot_count < 1 || s.plot_gap < 0) invalid("config.field", "plot_count >= 1 and plot_gap >= 0 required");
    if (!(s.crop_height - s.height_jitter > 0.0 && s.crop_height + s.height_jitter <= 2.0 && s.height_jitter >= 0.0)) {
      invalid("config.field", "crop height must stay within (0, 2] m");
    }
  }
  if (const Json* cj = rd.child("camera")) {
    Reader r(*cj, "config.camera");
    r.num("focal", c.camera.focal);
    r.num("mount_height", c.camera.mount_height);
    r.deg("pitch_deg", c.camera.pitch);
    r.integer("width", c.camera.width);
    r.integer("height", c.camera.height);
    r.num("forward_offset", c.camera.forward_offset);
    r.finish();
  }
  if (const Json* vj = rd.child("vehicle")) {
    Reader r(*vj, "config.vehicle");
    r.num("wheelbase", c.vehicle.wheelbase);
    r.deg("max_angle_deg", c.vehicle.max_angle);
    r.num("deadband", c.vehicle.deadband);
    r.num("v_max", c.vehicle.v_max);
    r.finish();
  }
  if (const Json* bj = rd.child("bar")) {
    Reader r(*bj, "config.bar");
    r.num("width", c.bar.width);
    r.num("offset", c.bar.offset);
    r.finish();
  }
  if (const Json* sj = rd.child("segmentation")) c.seg = seg_params_from_json(*sj, c.seg);
  if (const Json* sj = rd.child("steering")) {
    Reader r(*sj, "config.steering");
    r.num("v_left", c.steering.v_left);
    r.num("v_right", c.steering.v_right);
    r.finish();
  }
  if (const Json* pj = rd.child("speed_pid")) {
    Reader r(*pj, "config.speed_pid");
    r.num("kp", c.speed_pid.kp);
    r.num("ki", c.speed_pid.ki);
    r.num("kd", c.speed_pid.kd);
    r.num("integral_limit", c.speed_integral_limit);
    r.finish();
  }
  std::string mode;
  if (rd.str("mode", mode)) {
    if (mode == "planned") {
      c.mode = DriveMode::Planned;
    } else if (mode == "vision") {
      c.mode = DriveMode::Vision;
    } else {
      invalid("config.mode", "expected \"planned\" or \"vision\"");
    }
  }
  rd.num("dt", c.dt);
  rd.num("cruise_speed", c.cruise_speed);
  rd.num("turn_speed", c.turn_speed);
  rd.num("lookahead", c.lookahead);
  rd.num("approach", c.approach);
  rd.num("overrun", c.overrun);
  rd.num("rho", c.rho);
  rd.integer("k", c.k);
  rd.integer("vision_steer_index", c.vision_steer_index);
  rd.boolean("geofence_enabled", c.geofence_enabled);
  rd.integer("max_ticks", c.max_ticks);
  rd.num("noise_sigma", c.noise_sigma);
  if (const Json* sj = rd.child("start")) {
    Reader r(*sj, "config.start");
    VehiclePose p = c.start.value_or(VehiclePose{});
    r.num("x", p.x);
    r.num("y", p.y);
    r.deg("heading_deg", p.heading);
    r.finish();
    c.start = p;
  }
  if (rd.has("seed")) {
    rd.u64("seed", c.seed);
    c.field.seed = c.seed;
  }
  rd.finish();
  c.validate();
  return c;
}

Json to_json(const EpisodeConfig& c) {
  const auto& s = c.field;
  Json field = {{"rows", s.rows},
                {"cols", s.cols},
                {"cell_size", s.cell_size},
                {"crop", rect_to_json(s.crop)},
                {"plot_count", s.plot_count},
                {"plot_gap", s.plot_gap},
                {"split", s.split == SplitAxis::Columns ? "columns" : "rows"},
                {"residue", rects_to_json(s.residue)},
                {"laid", rects_to_json(s.laid)},
                {"trees", rects_to_json(s.trees)},
                {"shrubs", rects_to_json(s.shrubs)},
                {"fence_inset", s.fence_inset},
                {"crop_height", s.crop_height},
                {"height_jitter", s.height_jitter},
                {"seed", s.seed}};
  if (s.fence) field["fence"] = to_json(*s.fence)["vertices"];
  Json j = {{"fixture", "default"},
            {"field", field},
            {"camera",
             {{"focal", c.camera.focal},
              {"mount_height", c.camera.mount_height},
              {"pitch_deg", c.camera.pitch / kDeg},
              {"width", c.camera.width},
              {"height", c.camera.height},
              {"forward_offset", c.camera.forward_offset}}},
            {"vehicle",
             {{"wheelbase", c.vehicle.wheelbase},
              {"max_angle_deg", c.vehicle.max_angle / kDeg},
              {"deadband", c.vehicle.deadband},
              {"v_max", c.vehicle.v_max}}},
            {"bar", {{"width", c.bar.width}, {"offset", c.bar.offset}}},
            {"segmentation", to_json(c.seg)},
            {"steering", {{"v_left", c.steering.v_left}, {"v_right", c.steering.v_right}}},
            {"speed_pid",
             {{"kp", c.speed_pid.kp},
              {"ki", c.speed_pid.ki},
              {"kd", c.speed_pid.kd},
              {"integral_limit", c.speed_integral_limit}}},
            {"mode", to_string(c.mode)},
            {"dt", c.dt},
            {"cruise_speed", c.cruise_speed},
            {"turn_speed", c.turn_speed},
            {"lookahead", c.lookahead},
            {"approach", c.approach},
            {"overrun", c.overrun},
            {"rho", c.rho},
            {"k", c.k},
            {"vision_steer_index", c.vision_steer_index},
            {"geofence_enabled", c.geofence_enabled},
            {"max_ticks", c.max_ticks},
            {"noise_sigma", c.noise_sigma},
            {"seed", c.seed}};
  if (c.start) j["start"] = {{"x", c.start->x}, {"y", c.start->y}, {"heading_deg", c.start->heading / kDeg}};
  return j;
}

Json to_json(const VehiclePose& p) {
  return {{"x", p.x}, {"y", p.y}, {"heading", p.heading}, {"speed", p.speed}};
}

Json to_json(const EpisodeReport& r) {
  Json seps = Json::array();
  for (const auto& s : r.separations) {
    seps.push_back({{"pass", s.pass},
                    {"onset_frame", s.onset_frame},
                    {"detected_frame", s.detected_frame},
                    {"latency", s.latency()}});
  }
  return {{"frames", r.frames},
          {"initial_standing", r.initial_standing},
          {"harvested", r.harvested},
          {"coverage_fraction", r.coverage_fraction},
          {"fence_violations", r.fence_violations},
          {"laid_crop_traversals", r.laid_crop_traversals},
          {"stop_reason", r.stop_reason},
          {"planned_passes", r.planned_passes},
          {"final_pose", to_json(r.final_pose)},
          {"separations", seps},
          {"unmatched_detections", r.unmatched_detections}};
}

Json to_json(const TickLog& t) {
  return {{"tick", t.tick},
          {"t", t.t},
          {"pose", to_json(t.pose)},
          {"action", to_string(t.action)},
          {"index", t.steering_index},
          {"duty", t.duty},
          {"error", t.speed_error},
          {"u", t.pid_u},
          {"roof_median", t.roof_median},
          {"separation", t.separation},
          {"pass", t.pass}};
}

Json to_json(const GeoPolygon& p) {
  Json v = Json::array();
  for (const auto& g : p.vertices) v.push_back({g.lat, g.lon});
  return {{"vertices", v}, {"count", p.vertices.size()}};
}

}  // namespace reaper
