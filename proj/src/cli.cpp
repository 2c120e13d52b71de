#include "reaper/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "reaper/baselines.hpp"
#include "reaper/colorspace.hpp"
#include "reaper/config.hpp"
#include "reaper/episode.hpp"
#include "reaper/error.hpp"
#include "reaper/navigation.hpp"
#include "reaper/scenes.hpp"

namespace fs = std::filesystem;

namespace reaper {

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::UnknownMethod:
    case ErrorCode::InvalidArgument: return kExitConfig;
    case ErrorCode::MalformedHeader:
    case ErrorCode::TruncatedData:
    case ErrorCode::UnsupportedMaxval:
    case ErrorCode::IoFailure:
    case ErrorCode::TooFewPoints:
    case ErrorCode::DegeneratePolygon: return kExitInput;
    default: return kExitDomain;
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Config files are configuration: a missing or unreadable one is a config error.
Json read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("REAPER_SEED");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (*end != '\0') throw Error(ErrorCode::ConfigInvalid, std::string("REAPER_SEED is not an integer: ") + v);
  return s;
}

ByteImage mask_to_pgm(const BinaryMask& m) {
  ByteImage out(m.width(), m.height());
  std::transform(m.data().begin(), m.data().end(), out.data().begin(),
                 [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
  return out;
}

BinaryMask pgm_to_mask(const ByteImage& b) {
  BinaryMask out(b.width(), b.height());
  std::transform(b.data().begin(), b.data().end(), out.data().begin(),
                 [](std::uint8_t v) { return static_cast<std::uint8_t>(v != 0); });
  return out;
}

// Background dimmed and ground desaturated in HSV, vertical-line pixels red,
// centroid marked with a cyan cross.
RgbImage render_overlay(const RgbImage& frame, const SegmentationResult& seg, std::optional<Centroid> ctr) {
  RgbImage out(frame.width(), frame.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    HsvPixel p = rgb_to_hsv(frame.data()[i]);
    if (seg.vertical.data()[i]) {
      p = {0.0, 1.0, 1.0};
    } else if (seg.classes.data()[i] == PixelClass::Background) {
      p.v *= 0.3;
    } else if (seg.classes.data()[i] == PixelClass::Ground) {
      p.s = 0.0;
    }
    out.data()[i] = hsv_to_rgb(p);
  }
  if (ctr) {
    const int r0 = static_cast<int>(std::lround(ctr->row)), c0 = static_cast<int>(std::lround(ctr->col));
    for (int d = -4; d <= 4; ++d) {
      if (out.contains(r0 + d, c0)) out.at(r0 + d, c0) = {0, 255, 255};
      if (out.contains(r0, c0 + d)) out.at(r0, c0 + d) = {0, 255, 255};
    }
  }
  return out;
}

std::string frame_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d", i);
  return buf;
}

struct SegFlags {
  std::string preset;
  std::optional<double> phi1, phi2, lum_threshold;
  std::optional<int> line_length;
  std::vector<double> tilts;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Parameter preset (appendix restores the reference code constants)")
        ->check(CLI::IsMember({"appendix", "prose"}));
    cmd->add_option("--phi1", phi1, "Lower hue cut, degrees");
    cmd->add_option("--phi2", phi2, "Upper hue cut, degrees");
    cmd->add_option("--lum-threshold", lum_threshold, "Crop/ground luminance threshold");
    cmd->add_option("--line-length", line_length, "Structuring element length, pixels");
    cmd->add_option("--tilts", tilts, "Structuring element tilts, degrees");
  }

  // Flags first, then the optional JSON config on top.
  SegParams resolve(const Json* config) const {
    SegParams p = preset == "appendix" ? SegParams::appendix_preset() : SegParams{};
    if (phi1) p.phi1 = *phi1;
    if (phi2) p.phi2 = *phi2;
    if (lum_threshold) p.lum_threshold = *lum_threshold;
    if (line_length) p.line_length = *line_length;
    if (!tilts.empty()) p.tilts = tilts;
    if (config) return seg_params_from_json(*config, p);
    p.validate();
    return p;
  }
};

struct Score {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  Json to_json() const {
    const double marked = static_cast<double>(tp + fp);
    const double pos = static_cast<double>(tp + fn);
    const double all = static_cast<double>(tp + fp + fn + tn);
    return {{"precision", marked > 0 ? tp / marked : 0.0},
            {"recall", pos > 0 ? tp / pos : 0.0},
            {"accuracy", all > 0 ? (tp + tn) / all : 0.0},
            {"marked_fraction", all > 0 ? marked / all : 0.0}};
  }
};

Score score_mask(const BinaryMask& predicted, const BinaryMask& truth) {
  if (predicted.width() != truth.width() || predicted.height() != truth.height()) {
    throw Error(ErrorCode::InvalidArgument, "truth size does not match the frame");
  }
  Score s;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted.data()[i] != 0, t = truth.data()[i] != 0;
    (p ? (t ? s.tp : s.fp) : (t ? s.fn : s.tn)) += 1;
  }
  return s;
}

int cmd_segment(const std::string& input, const std::string& out_dir, const std::string& labels_dir,
                const std::string& config_path, const SegFlags& flags, double rho, int k, std::ostream& out) {
  std::optional<Json> config;
  if (!config_path.empty()) config = read_config(config_path);
  const SegParams params = flags.resolve(config ? &*config : nullptr);
  SeparationMonitor monitor(rho, k);

  std::error_code ec;
  if (!fs::is_directory(input, ec)) throw Error(ErrorCode::IoFailure, "input directory not found: " + input);
  std::vector<fs::path> frames;
  for (const auto& e : fs::directory_iterator(input)) {
    if (e.is_regular_file() && e.path().extension() == ".ppm") frames.push_back(e.path());
  }
  if (frames.empty()) throw Error(ErrorCode::IoFailure, "no .ppm frames in " + input);
  std::sort(frames.begin(), frames.end());

  make_dirs(fs::path(out_dir) / "overlay");
  make_dirs(fs::path(out_dir) / "vertical");
  std::ostringstream jsonl;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RgbImage img = load_ppm(frames[i]);
    const SegmentationResult seg = run_pipeline(img, params);
    const auto ctr = centroid(seg.vertical);
    NavDecision d = region_decision(ctr ? std::optional<double>(ctr->col) : std::nullopt, img.width());
    const bool sep = monitor.push(crop_roof(seg.vertical));
    if (sep) d.action = NavAction::TurnAtSeparation;
    const std::string stem = frames[i].stem().string();
    save_ppm(render_overlay(img, seg, ctr), fs::path(out_dir) / "overlay" / (stem + ".ppm"));
    save_pgm(mask_to_pgm(seg.vertical), fs::path(out_dir) / "vertical" / (stem + ".pgm"));

    Json row = {{"frame", stem},
                {"index", i},
                {"centroid", ctr ? Json{ctr->row, ctr->col} : Json(nullptr)},
                {"decision", to_string(d.action)},
                {"roof_median", monitor.last_median()},
                {"separation", sep},
                {"crop_pixels", count_set(seg.crop)},
                {"vertical_pixels", count_set(seg.vertical)}};
    if (!labels_dir.empty()) {
      const fs::path lp = fs::path(labels_dir) / (stem + ".pgm");
      if (fs::exists(lp)) {
        const ClassMask truth = labels_from_bytes(load_pgm(lp));
        std::size_t agree = 0;
        for (std::size_t p = 0; p < truth.size(); ++p) agree += truth.data()[p] == seg.classes.data()[p];
        row["agreement"] = static_cast<double>(agree) / static_cast<double>(truth.size());
      }
    }
    jsonl << row.dump() << '\n';
  }
  write_text(fs::path(out_dir) / "segment.jsonl", jsonl.str());
  out << "segmented " << frames.size() << " frame(s) into " << out_dir << '\n';
  return kExitOk;
}

struct BaselineFlags {
  std::string method, input, labels, truth, out_dir, config;
  double low = 0.1, high = 0.3, sigma = 1.0;
  double template_mean = 0.6, tau = 0.02;
  int window = 5;
  int channel = 2;
  double i_threshold = 0.1;
};

int cmd_baseline(const BaselineFlags& f, std::ostream& out) {
  static const std::vector<std::string> methods{"canny", "chisq", "glcm", "i1i2i3"};
  if (std::find(methods.begin(), methods.end(), f.method) == methods.end()) {
    throw Error(ErrorCode::UnknownMethod, "unknown method \"" + f.method + "\" (canny, chisq, glcm, i1i2i3)");
  }
  GlcmSegParams glcm_params;
  if (!f.config.empty()) {
    const Json cfg = read_config(f.config);
    if (cfg.contains("glcm")) glcm_params = glcm_params_from_json(cfg.at("glcm"));
  }
  const RgbImage img = load_ppm(f.input);
  BinaryMask mask;
  if (f.method == "canny") {
    mask = canny(to_luminance(img), f.low, f.high, f.sigma);
  } else if (f.method == "chisq") {
    mask = chi_square_match(to_luminance(img), f.template_mean, f.window, f.tau);
  } else if (f.method == "glcm") {
    mask = glcm_segment(to_luminance(img), glcm_params);
  } else {
    mask = i1i2i3_segment(img, f.channel, f.i_threshold);
  }
  make_dirs(f.out_dir);
  save_pgm(mask_to_pgm(mask), fs::path(f.out_dir) / (f.method + ".pgm"));

  Json row = {{"method", f.method}, {"input", fs::path(f.input).filename().string()}, {"marked", count_set(mask)}};
  std::optional<BinaryMask> truth;
  if (!f.truth.empty()) {
    truth = pgm_to_mask(load_pgm(f.truth));
    row["truth"] = "region";
  } else if (!f.labels.empty()) {
    truth = crop_mask(labels_from_bytes(load_pgm(f.labels)));
    row["truth"] = "crop_labels";
  }
  if (truth) row["score"] = score_mask(mask, *truth).to_json();
  write_text(fs::path(f.out_dir) / (f.method + ".json"), row.dump() + "\n");
  out << row.dump() << '\n';
  return kExitOk;
}

struct SimulateFlags {
  std::string config, fixture = "two_plot", out_dir, preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_ticks;
  bool frames = false;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  // Layers: flags, then REAPER_SEED, then the JSON config.
  Json layered = {{"fixture", f.fixture}};
  if (f.preset == "appendix") layered["segmentation"] = {{"mode", "appendix"}};
  if (f.seed) layered["seed"] = *f.seed;
  if (f.max_ticks) layered["max_ticks"] = *f.max_ticks;
  if (const auto s = env_seed()) layered["seed"] = *s;
  if (!f.config.empty()) {
    const Json cfg = read_config(f.config);
    if (!cfg.is_object()) throw Error(ErrorCode::ConfigInvalid, f.config + ": expected a JSON object");
    layered.merge_patch(cfg);
  }
  const EpisodeConfig config = episode_config_from_json(layered);

  const fs::path dir(f.out_dir);
  make_dirs(dir);
  if (f.frames) {
    make_dirs(dir / "frames");
    make_dirs(dir / "labels");
    make_dirs(dir / "overlay");
  }
  FrameSink sink;
  if (f.frames) {
    sink = [&](const FrameRecord& rec) {
      const std::string name = frame_name(rec.log.tick + 1);
      save_ppm(rec.frame.image, dir / "frames" / (name + ".ppm"));
      save_pgm(labels_to_bytes(rec.frame.labels), dir / "labels" / (name + ".pgm"));
      save_ppm(render_overlay(rec.frame.image, rec.seg, centroid(rec.seg.vertical)), dir / "overlay" / (name + ".ppm"));
    };
  }
  const EpisodeReport report = run_episode(config, sink);

  std::ostringstream log;
  for (const auto& t : report.decisions) log << to_json(t).dump() << '\n';
  write_text(dir / "log.jsonl", log.str());
  write_text(dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(dir / "config.json", to_json(config).dump(2) + "\n");

  char line[256];
  std::snprintf(line, sizeof line, "frames %d coverage %.4f violations %d traversals %d stop %s\n", report.frames,
                report.coverage_fraction, report.fence_violations, report.laid_crop_traversals,
                report.stop_reason.c_str());
  out << line;
  return report.fence_violations == 0 ? kExitOk : kExitDomain;
}

std::vector<GeoPoint> read_trace(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorCode::IoFailure, "trace not found: " + path);
  std::istringstream in(read_text(path));
  std::vector<GeoPoint> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line.erase(std::remove(line.begin(), line.end(), '\r'), line.end());
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    double lat = 0.0, lon = 0.0;
    bool ok = comma != std::string::npos;
    if (ok) {
      try {
        std::size_t a = 0, b = 0;
        lat = std::stod(line.substr(0, comma), &a);
        lon = std::stod(line.substr(comma + 1), &b);
        ok = line.find_first_not_of(" \t", a) == comma &&
             line.find_first_not_of(" \t", comma + 1 + b) == std::string::npos;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      if (pts.empty() && lineno == 1) continue;  // header row
      throw Error(ErrorCode::IoFailure, path + ":" + std::to_string(lineno) + ": expected \"lat,lon\"");
    }
    pts.push_back({lat, lon});
  }
  // A trace that returns to its first point is closed implicitly.
  if (pts.size() > 3 && pts.front() == pts.back()) pts.pop_back();
  return pts;
}

int cmd_geofence(const std::string& trace_path, double eps, const std::string& out_path, std::ostream& out) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "eps must be >= 0");
  const std::vector<GeoPoint> trace = read_trace(trace_path);
  const GeoPolygon poly = compress_boundary(trace, eps);
  validate_polygon(poly);
  const std::string text = to_json(poly).dump() + "\n";
  if (!out_path.empty()) write_text(out_path, text);
  out << text;
  return kExitOk;
}

int cmd_fixture(const std::string& kind, const std::string& out_dir, int count, std::uint64_t seed, double noise,
                std::ostream& out) {
  if (const auto s = env_seed()) seed = *s;
  const fs::path dir(out_dir);
  make_dirs(dir);
  if (kind == "laid" || kind == "residue") {
    const PaintedScene s = kind == "laid" ? standing_laid_scene(320, 240, seed) : residue_scene(320, 240, seed);
    save_ppm(s.image, dir / (kind + ".ppm"));
    save_pgm(labels_to_bytes(s.labels), dir / (kind + "_labels.pgm"));
    save_pgm(mask_to_pgm(s.standing), dir / (kind + "_standing.pgm"));
    save_pgm(mask_to_pgm(kind == "laid" ? s.laid : s.residue), dir / (kind + "_region.pgm"));
    out << "wrote " << kind << " scene to " << out_dir << '\n';
  } else if (kind == "frames") {
    if (count < 1) throw Error(ErrorCode::ConfigInvalid, "count must be >= 1");
    make_dirs(dir / "frames");
    make_dirs(dir / "labels");
    for (int i = 0; i < count; ++i) {
      const RenderedFrame f = labeled_frame(seed + static_cast<std::uint64_t>(i), 320, 240, noise);
      save_ppm(f.image, dir / "frames" / (frame_name(i + 1) + ".ppm"));
      save_pgm(labels_to_bytes(f.labels), dir / "labels" / (frame_name(i + 1) + ".pgm"));
    }
    out << "wrote " << count << " labeled frame(s) to " << out_dir << '\n';
  } else {
    const EpisodeConfig cfg = kind == "strip" ? strip_fixture() : two_plot_fixture();
    write_text(dir / (kind + ".json"), to_json(cfg).dump(2) + "\n");
    out << "wrote " << kind << " episode config to " << out_dir << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wheat-reaper vision, control and field simulation toolkit", "reaper"};
  app.require_subcommand(1);

  std::string seg_input, seg_out, seg_labels, seg_config;
  double seg_rho = 0.4;
  int seg_k = 3;
  SegFlags seg_flags;
  auto* seg = app.add_subcommand("segment", "Segment a directory of PPM frames");
  seg->add_option("--input", seg_input, "Directory of .ppm frames")->required();
  seg->add_option("--out", seg_out, "Output directory")->required();
  seg->add_option("--labels", seg_labels, "Directory of sidecar label .pgm files");
  seg->add_option("--config", seg_config, "JSON segmentation parameters");
  seg->add_option("--rho", seg_rho, "Roof drop fraction for separation");
  seg->add_option("--k", seg_k, "Frames a roof drop must persist");
  seg_flags.add_to(seg);

  BaselineFlags bf;
  auto* base = app.add_subcommand("baseline", "Run a baseline segmenter on one frame");
  base->add_option("--method", bf.method, "canny, chisq, glcm or i1i2i3")->required();
  base->add_option("--input", bf.input, "Input .ppm frame")->required();
  base->add_option("--out", bf.out_dir, "Output directory")->required();
  base->add_option("--labels", bf.labels, "Sidecar label .pgm; crop pixels are the positives");
  base->add_option("--truth", bf.truth, "Binary region .pgm used as positives instead of labels");
  base->add_option("--config", bf.config, "JSON with a \"glcm\" section");
  base->add_option("--low", bf.low, "Canny low threshold");
  base->add_option("--high", bf.high, "Canny high threshold");
  base->add_option("--sigma", bf.sigma, "Canny Gaussian sigma");
  base->add_option("--template-mean", bf.template_mean, "Chi-square template mean");
  base->add_option("--window", bf.window, "Chi-square window (odd)");
  base->add_option("--tau", bf.tau, "Chi-square acceptance threshold");
  base->add_option("--channel", bf.channel, "I1I2I3 channel (2 or 3)");
  base->add_option("--threshold", bf.i_threshold, "I1I2I3 channel threshold");

  SimulateFlags sf;
  auto* sim = app.add_subcommand("simulate", "Run a closed-loop episode");
  sim->add_option("--config", sf.config, "JSON episode config (overrides flags)");
  sim->add_option("--fixture", sf.fixture, "Base scenario")->check(CLI::IsMember({"two_plot", "strip", "default"}));
  sim->add_option("--preset", sf.preset, "Segmentation preset")->check(CLI::IsMember({"appendix", "prose"}));
  sim->add_option("--seed", sf.seed, "Random seed");
  sim->add_option("--max-ticks", sf.max_ticks, "Tick budget");
  sim->add_option("--out", sf.out_dir, "Output directory")->required();
  sim->add_flag("--frames", sf.frames, "Write frames, labels and overlays");

  std::string trace, fence_out;
  double eps = 0.0;
  auto* geo = app.add_subcommand("geofence", "Compress a boundary trace into a geofence polygon");
  geo->add_option("--trace", trace, "CSV of lat,lon lines")->required();
  geo->add_option("--eps", eps, "Simplification tolerance, degrees");
  geo->add_option("--out", fence_out, "Also write the polygon JSON here");

  std::string fx_kind = "frames", fx_out;
  int fx_count = 20;
  std::uint64_t fx_seed = 1;
  double fx_noise = 0.0;
  auto* fix = app.add_subcommand("fixture", "Write synthetic frames, painted scenes or episode configs");
  fix->add_option("--kind", fx_kind, "frames, laid, residue, two_plot or strip")
      ->check(CLI::IsMember({"frames", "laid", "residue", "two_plot", "strip"}));
  fix->add_option("--out", fx_out, "Output directory")->required();
  fix->add_option("--count", fx_count, "Number of frames");
  fix->add_option("--seed", fx_seed, "Random seed");
  fix->add_option("--noise", fx_noise, "Gaussian noise sigma on the [0,1] scale");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "reaper: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (seg->parsed()) return cmd_segment(seg_input, seg_out, seg_labels, seg_config, seg_flags, seg_rho, seg_k, out);
    if (base->parsed()) return cmd_baseline(bf, out);
    if (sim->parsed()) return cmd_simulate(sf, out);
    if (geo->parsed()) return cmd_geofence(trace, eps, fence_out, out);
    if (fix->parsed()) return cmd_fixture(fx_kind, fx_out, fx_count, fx_seed, fx_noise, out);
  } catch (const Error& e) {
    err << "reaper: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "reaper: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitConfig;
}

}  // namespace reaper
