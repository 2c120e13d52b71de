#include "reaper/fieldsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "reaper/error.hpp"

namespace reaper {

const char* to_string(Material m) {
  switch (m) {
    case Material::Sky: return "sky";
    case Material::Ground: return "ground";
    case Material::StandingCrop: return "standing_crop";
    case Material::LaidCrop: return "laid_crop";
    case Material::Residue: return "residue";
    case Material::Tree: return "tree";
    case Material::Shrub: return "shrub";
  }
  return "unknown";
}

namespace {

void paint(FieldGrid& g, const CellRect& rect, Cell kind, double height) {
  const int r0 = std::max(0, rect.row), r1 = std::min(g.rows, rect.row + rect.rows);
  const int c0 = std::max(0, rect.col), c1 = std::min(g.cols, rect.col + rect.cols);
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      g.at(r, c) = kind;
      g.height_at(r, c) = height;
    }
  }
}

// Portable uniform draw in [0,1).
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

FieldGrid generate_field(const FieldSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw Error(ErrorCode::InvalidArgument, "field dimensions must be >= 1");
  if (!(spec.cell_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "cell_size must be positive");
  if (spec.plot_count < 1 || spec.plot_gap < 0) throw Error(ErrorCode::InvalidArgument, "bad plot layout");
  const double lo = spec.crop_height - spec.height_jitter, hi = spec.crop_height + spec.height_jitter;
  if (!(spec.height_jitter >= 0.0 && lo > 0.0 && hi <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "crop height must stay within (0, 2] m");
  }

  FieldGrid g;
  g.rows = spec.rows;
  g.cols = spec.cols;
  g.cell_size = spec.cell_size;
  const auto n = static_cast<std::size_t>(spec.rows) * static_cast<std::size_t>(spec.cols);
  g.cells.assign(n, Cell::BareGround);
  g.heights.assign(n, 0.0);

  const bool by_cols = spec.split == SplitAxis::Columns;
  const int extent = by_cols ? spec.crop.cols : spec.crop.rows;
  const int usable = extent - spec.plot_gap * (spec.plot_count - 1);
  if (extent > 0 && usable < spec.plot_count) throw Error(ErrorCode::InvalidArgument, "plot gaps leave no room for crop");
  int pos = 0;
  for (int p = 0; p < spec.plot_count && extent > 0; ++p) {
    const int len = usable / spec.plot_count + (p == spec.plot_count - 1 ? usable % spec.plot_count : 0);
    CellRect plot = spec.crop;
    if (by_cols) {
      plot.col = spec.crop.col + pos;
      plot.cols = len;
    } else {
      plot.row = spec.crop.row + pos;
      plot.rows = len;
    }
    paint(g, plot, Cell::StandingCrop, spec.crop_height);
    pos += len + spec.plot_gap;
  }

  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = unit_draw(rng);
    if (g.cells[i] == Cell::StandingCrop) g.heights[i] = spec.crop_height + spec.height_jitter * (2.0 * u - 1.0);
  }
  for (const auto& r : spec.laid) paint(g, r, Cell::HarvestedLaid, 0.0);
  for (const auto& r : spec.residue) paint(g, r, Cell::Residue, spec.residue_height);
  for (const auto& r : spec.shrubs) paint(g, r, Cell::Shrub, spec.shrub_height);
  for (const auto& r : spec.trees) paint(g, r, Cell::Tree, spec.tree_height);

  if (spec.fence) {
    g.fence = *spec.fence;
  } else {
    const double m = spec.fence_inset * spec.cell_size;
    const double w = g.width_m(), h = g.height_m();
    g.fence.vertices = {to_geo({m, m}), to_geo({w - m, m}), to_geo({w - m, h - m}), to_geo({m, h - m})};
  }
  return g;
}

void CameraModel::validate() const {
  if (!(focal > 0.0)) throw Error(ErrorCode::ConfigInvalid, "camera focal must be positive");
  if (width < 1 || height < 1) throw Error(ErrorCode::ConfigInvalid, "camera image size must be >= 1");
  if (!(mount_height > 0.0)) throw Error(ErrorCode::ConfigInvalid, "camera mount height must be positive");
  if (!(std::abs(pitch) < M_PI / 2)) throw Error(ErrorCode::ConfigInvalid, "camera pitch must be within +-90 deg");
  if (!std::isfinite(forward_offset)) throw Error(ErrorCode::ConfigInvalid, "camera offset must be finite");
}

namespace {

struct Vec3 {
  double x, y, z;
};

struct Hit {
  Material material = Material::Sky;
  bool alt_shade = false;
};

double volume_height(const FieldGrid& g, int r, int c) {
  switch (g.at(r, c)) {
    case Cell::StandingCrop:
    case Cell::Residue:
    case Cell::Tree:
    case Cell::Shrub: return g.height_at(r, c);
    default: return 0.0;
  }
}

Material volume_material(Cell cell) {
  switch (cell) {
    case Cell::StandingCrop: return Material::StandingCrop;
    case Cell::Residue: return Material::Residue;
    case Cell::Tree: return Material::Tree;
    default: return Material::Shrub;
  }
}

Hit volume_hit(const FieldGrid& g, int r, int c) {
  const double h = g.height_at(r, c);
  return {volume_material(g.at(r, c)), static_cast<long>(std::floor(h * 1000.0)) % 2 != 0};
}

Hit flat_hit(const FieldGrid& g, int r, int c) {
  return {g.at(r, c) == Cell::HarvestedLaid ? Material::LaidCrop : Material::Ground, false};
}

Hit trace(const FieldGrid& g, Vec3 o, Vec3 d) {
  const double cs = g.cell_size;
  const double inf = std::numeric_limits<double>::infinity();
  const Hit open{d.z < 0.0 ? Material::Ground : Material::Sky, false};
  int c = static_cast<int>(std::floor(o.x / cs));
  int r = static_cast<int>(std::floor(o.y / cs));
  if (!g.contains(r, c)) return open;

  const int step_c = d.x > 0.0 ? 1 : -1;
  const int step_r = d.y > 0.0 ? 1 : -1;
  double tmax_x = d.x != 0.0 ? ((c + (d.x > 0.0 ? 1 : 0)) * cs - o.x) / d.x : inf;
  double tmax_y = d.y != 0.0 ? ((r + (d.y > 0.0 ? 1 : 0)) * cs - o.y) / d.y : inf;
  const double tdelta_x = d.x != 0.0 ? cs / std::abs(d.x) : inf;
  const double tdelta_y = d.y != 0.0 ? cs / std::abs(d.y) : inf;
  const double t_ground = d.z < 0.0 ? -o.z / d.z : inf;

  double t_enter = 0.0;
  bool first = true;
  while (g.contains(r, c)) {
    const double t_exit = std::min(tmax_x, tmax_y);
    const double h = volume_height(g, r, c);
    // A volume that encloses the camera is ignored.
    if (h > 0.0 && !(first && o.z <= h)) {
      if (o.z + d.z * t_enter <= h) return volume_hit(g, r, c);
      if (d.z < 0.0 && o.z + d.z * t_exit <= h) return volume_hit(g, r, c);
    } else if (t_ground <= t_exit) {
      return flat_hit(g, r, c);
    }
    if (t_exit == inf) break;
    if (tmax_x < tmax_y) {
      c += step_c;
      t_enter = tmax_x;
      tmax_x += tdelta_x;
    } else {
      r += step_r;
      t_enter = tmax_y;
      tmax_y += tdelta_y;
    }
    first = false;
  }
  return open;
}

void shade(const Hit& hit, int row, int col, int width, Rgb& color, PixelClass& label) {
  switch (hit.material) {
    case Material::StandingCrop:
    case Material::Residue: {
      // Stalk streaks keyed on the distance from the image center column.
      const int m = std::abs(2 * col - (width - 1)) / 2;
      if (m % 4 < 2) {
        color = hit.alt_shade ? palette::kGoldenAlt : palette::kGolden;
        label = PixelClass::Crop;
      } else {
        color = palette::kStalkGap;
        label = PixelClass::Ground;
      }
      return;
    }
    case Material::LaidCrop:
      if (row % 4 < 2) {
        color = palette::kGolden;
        label = PixelClass::Crop;
      } else {
        color = palette::kStalkGap;
        label = PixelClass::Ground;
      }
      return;
    case Material::Ground:
      color = row % 5 == 0 ? palette::kGroundStreak : palette::kGround;
      label = PixelClass::Ground;
      return;
    case Material::Sky:
      color = palette::kSky;
      label = PixelClass::Background;
      return;
    case Material::Tree:
    case Material::Shrub:
      color = palette::kFoliage;
      label = PixelClass::Background;
      return;
  }
}

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

RenderedFrame render_frame(const FieldGrid& field, const VehiclePose& pose, const CameraModel& cam,
                           const RenderOptions& options) {
  cam.validate();
  const int w = cam.width, h = cam.height;
  RenderedFrame out{RgbImage(w, h), ClassMask(w, h), Raster<Material>(w, h)};

  const double ch = std::cos(pose.heading), sh = std::sin(pose.heading);
  const double cp = std::cos(cam.pitch), sp = std::sin(cam.pitch);
  const Vec3 origin{pose.x + cam.forward_offset * ch, pose.y + cam.forward_offset * sh, cam.mount_height};
  const Vec3 fwd{cp * ch, cp * sh, sp};
  const Vec3 right{-sh, ch, 0.0};
  const Vec3 down{sp * ch, sp * sh, -cp};
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;

  for (int r = 0; r < h; ++r) {
    const double v = (r - cy) / cam.focal;
    for (int c = 0; c < w; ++c) {
      const double u = (c - cx) / cam.focal;
      const Vec3 d{fwd.x + right.x * u + down.x * v, fwd.y + right.y * u + down.y * v,
                   fwd.z + right.z * u + down.z * v};
      const Hit hit = trace(field, origin, d);
      out.materials.at(r, c) = hit.material;
      shade(hit, r, c, w, out.image.at(r, c), out.labels.at(r, c));
    }
  }

  if (options.washout) {
    const auto& wr = options.washout->region;
    const double s = std::clamp(options.washout->strength, 0.0, 1.0);
    for (int r = std::max(0, wr.row); r < std::min(h, wr.row + wr.rows); ++r) {
      for (int c = std::max(0, wr.col); c < std::min(w, wr.col + wr.cols); ++c) {
        Rgb& p = out.image.at(r, c);
        p = {clamp_byte(p.r + s * (255 - p.r)), clamp_byte(p.g + s * (255 - p.g)), clamp_byte(p.b + s * (255 - p.b))};
      }
    }
  }
  if (options.noise_sigma > 0.0) {
    std::mt19937_64 rng(options.noise_seed);
    std::normal_distribution<double> noise(0.0, options.noise_sigma * 255.0);
    for (Rgb& p : out.image.data()) {
      p.r = clamp_byte(p.r + noise(rng));
      p.g = clamp_byte(p.g + noise(rng));
      p.b = clamp_byte(p.b + noise(rng));
    }
  }
  return out;
}

ByteImage labels_to_bytes(const ClassMask& labels) {
  ByteImage out(labels.width(), labels.height());
  std::transform(labels.data().begin(), labels.data().end(), out.data().begin(),
                 [](PixelClass c) { return static_cast<std::uint8_t>(c); });
  return out;
}

ClassMask labels_from_bytes(const ByteImage& bytes) {
  ClassMask out(bytes.width(), bytes.height());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::uint8_t b = bytes.data()[i];
    if (b > 2) throw Error(ErrorCode::InvalidArgument, "label value " + std::to_string(b) + " outside 0..2");
    out.data()[i] = static_cast<PixelClass>(b);
  }
  return out;
}

VehiclePose step_vehicle(const VehiclePose& pose, SteeringIndex idx, double duty, double dt,
                         const VehicleParams& params) {
  if (!(dt > 0.0)) throw Error(ErrorCode::NonpositiveDt, "dt must be positive");
  if (!(params.wheelbase > 0.0)) throw Error(ErrorCode::InvalidArgument, "wheelbase must be positive");
  const double v = pwm_to_speed(duty, params.deadband, params.v_max);
  VehiclePose out = pose;
  out.speed = v;
  if (v == 0.0) return out;
  const double delta = index_to_angle(idx, params.max_angle);
  out.heading = std::remainder(pose.heading + v * std::tan(delta) / params.wheelbase * dt, 2.0 * M_PI);
  out.x = pose.x + v * std::cos(out.heading) * dt;
  out.y = pose.y + v * std::sin(out.heading) * dt;
  return out;
}

std::vector<int> bar_footprint(const FieldGrid& field, const VehiclePose& pose, const CuttingBar& bar) {
  if (!(bar.width > 0.0)) throw Error(ErrorCode::InvalidArgument, "bar width must be positive");
  const double ch = std::cos(pose.heading), sh = std::sin(pose.heading);
  const double bx = pose.x + bar.offset * ch, by = pose.y + bar.offset * sh;
  const double cs = field.cell_size;
  const double reach = bar.width / 2.0 + cs;
  const int c0 = std::max(0, static_cast<int>(std::floor((bx - reach) / cs)));
  const int c1 = std::min(field.cols - 1, static_cast<int>(std::floor((bx + reach) / cs)));
  const int r0 = std::max(0, static_cast<int>(std::floor((by - reach) / cs)));
  const int r1 = std::min(field.rows - 1, static_cast<int>(std::floor((by + reach) / cs)));
  std::vector<int> out;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const Vec2 cc = field.cell_center(r, c);
      const double dx = cc.x - bx, dy = cc.y - by;
      const double along = dx * ch + dy * sh;
      const double lateral = -dx * sh + dy * ch;
      if (std::abs(lateral) <= bar.width / 2.0 && std::abs(along) <= cs / 2.0) out.push_back(r * field.cols + c);
    }
  }
  return out;
}

CutResult apply_cut(FieldGrid& field, const VehiclePose& pose, const CuttingBar& bar, std::vector<int>* previous) {
  std::vector<int> fp = bar_footprint(field, pose, bar);
  CutResult res;
  for (int idx : fp) {
    Cell& cell = field.cells[static_cast<std::size_t>(idx)];
    if (cell == Cell::StandingCrop) {
      cell = Cell::HarvestedLaid;
      field.heights[static_cast<std::size_t>(idx)] = 0.0;
      ++res.cut_count;
    } else if (cell == Cell::HarvestedLaid) {
      const bool was_under = previous && std::binary_search(previous->begin(), previous->end(), idx);
      if (!was_under) ++res.traversals;
    }
  }
  if (previous) *previous = std::move(fp);
  return res;
}

}  // namespace reaper
