#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reaper/control.hpp"
#include "reaper/field.hpp"
#include "reaper/image.hpp"
#include "reaper/segmentation.hpp"

namespace reaper {

struct CellRect {
  int row = 0;
  int col = 0;
  int rows = 1;
  int cols = 1;
};

enum class SplitAxis { Columns, Rows };

struct FieldSpec {
  int rows = 40;
  int cols = 60;
  double cell_size = 0.25;
  // Crop area; everything else starts as BareGround.
  CellRect crop{0, 0, 0, 0};
  int plot_count = 1;
  // Width in cells of the BareGround band between neighbouring plots.
  int plot_gap = 0;
  // Columns: plots sit side by side and the gap is a band of columns.
  SplitAxis split = SplitAxis::Columns;
  std::vector<CellRect> residue;
  std::vector<CellRect> laid;
  std::vector<CellRect> trees;
  std::vector<CellRect> shrubs;
  // Fence in grid meters; when absent the world rectangle inset by fence_inset
  // cells is used.
  std::optional<GeoPolygon> fence;
  int fence_inset = 1;
  double crop_height = 1.0;
  double height_jitter = 0.05;
  double residue_height = 0.12;
  double tree_height = 3.0;
  double shrub_height = 0.6;
  std::uint64_t seed = 1;
};

FieldGrid generate_field(const FieldSpec& spec);

enum class Material : std::uint8_t { Sky, Ground, StandingCrop, LaidCrop, Residue, Tree, Shrub };

const char* to_string(Material m);

struct VehiclePose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
};

struct CameraModel {
  double focal = 200.0;
  double mount_height = 0.5;
  // Elevation of the optical axis; positive looks up.
  double pitch = 0.2617993877991494;
  int width = 320;
  int height = 240;
  // Distance of the camera ahead of the pose point along the heading.
  double forward_offset = 0.35;

  void validate() const;
};

struct Washout {
  CellRect region;
  // 0 leaves pixels untouched, 1 paints them white.
  double strength = 0.8;
};

struct RenderOptions {
  // Standard deviation on the [0,1] intensity scale.
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  std::optional<Washout> washout;
};

struct RenderedFrame {
  RgbImage image;
  ClassMask labels;
  Raster<Material> materials;
};

namespace palette {
inline constexpr Rgb kGolden{218, 165, 32};
inline constexpr Rgb kGoldenAlt{180, 130, 25};
inline constexpr Rgb kStalkGap{90, 65, 20};
inline constexpr Rgb kGround{120, 85, 50};
inline constexpr Rgb kGroundStreak{95, 68, 40};
inline constexpr Rgb kSky{135, 180, 235};
inline constexpr Rgb kFoliage{50, 110, 40};
}  // namespace palette

RenderedFrame render_frame(const FieldGrid& field, const VehiclePose& pose, const CameraModel& cam,
                           const RenderOptions& options = {});

// Label map as bytes: 0 background, 1 crop, 2 ground.
ByteImage labels_to_bytes(const ClassMask& labels);
ClassMask labels_from_bytes(const ByteImage& bytes);

struct VehicleParams {
  double wheelbase = 0.4;
  double max_angle = 0.7853981633974483;
  double deadband = 0.15;
  double v_max = 1.5;
};

VehiclePose step_vehicle(const VehiclePose& pose, SteeringIndex idx, double duty, double dt,
                         const VehicleParams& params);

struct CuttingBar {
  double width = 1.0;
  // Distance of the bar ahead of the pose point.
  double offset = 0.45;
};

struct CutResult {
  int cut_count = 0;
  int traversals = 0;
};

// Cells whose centers lie under the bar: within width/2 across and half a cell
// along the heading.
std::vector<int> bar_footprint(const FieldGrid& field, const VehiclePose& pose, const CuttingBar& bar);

// Converts StandingCrop under the bar to HarvestedLaid. A HarvestedLaid cell
// counts as a traversal when it enters the footprint; `previous` carries the
// footprint between ticks and is updated in place.
CutResult apply_cut(FieldGrid& field, const VehiclePose& pose, const CuttingBar& bar,
                    std::vector<int>* previous = nullptr);

}  // namespace reaper
