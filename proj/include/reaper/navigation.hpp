#pragma once

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "reaper/field.hpp"
#include "reaper/geometry.hpp"
#include "reaper/image.hpp"

namespace reaper {

enum class NavAction { SteerLeft, Straight, SteerRight, TurnAtSeparation, Stop };

const char* to_string(NavAction a);

struct NavDecision {
  NavAction action = NavAction::Stop;
};

struct Centroid {
  double row = 0.0;
  double col = 0.0;
};

std::optional<Centroid> centroid(const BinaryMask& mask);

// Thirds are measured on pixel centers (col + 0.5), which keeps the rule
// exactly mirror-symmetric.
NavDecision region_decision(std::optional<double> col, int width);

struct RoofProfile {
  int image_height = 0;
  // Rows from the bottom, per column; nullopt where the column has no crop.
  std::vector<std::optional<int>> heights;
};

// Raw roof (image_height - topmost set row) smoothed by a 5-column median over
// the present neighbours; empty columns stay absent.
RoofProfile crop_roof(const BinaryMask& mask);

// Median over present columns of the center third; 0 when none are present.
double roof_center_median(const RoofProfile& roof);

// True on the frame where the center-third roof median has stayed at or below
// (1 - rho) of its pre-drop level for exactly k consecutive frames. The
// pre-drop level is the maximum over up to k frames preceding the low run, so
// `history` should hold the last 2k profiles (oldest first).
bool detect_separation(std::span<const RoofProfile> history, double rho, int k);

// Bounded roof history owned by the episode loop.
class SeparationMonitor {
 public:
  SeparationMonitor(double rho, int k);

  // Returns detect_separation over the updated history.
  bool push(RoofProfile roof);
  void reset() { history_.clear(); }
  double last_median() const { return last_median_; }

 private:
  double rho_;
  int k_;
  std::deque<RoofProfile> history_;
  double last_median_ = 0.0;
};

// Throws DegeneratePolygon for fewer than 3 vertices, zero area, or crossing
// edges.
void validate_polygon(const GeoPolygon& poly);

// Ray-casting parity; points on an edge count as inside.
bool point_in_polygon(const GeoPolygon& poly, GeoPoint p);

// Douglas-Peucker on a closed trace. eps <= 0 returns the trace verbatim. The
// result may be degenerate (e.g. a collinear trace); run validate_polygon.
GeoPolygon compress_boundary(std::span<const GeoPoint> trace, double eps);

double polygon_area(const GeoPolygon& poly);

struct CoveragePass {
  Vec2 start;
  Vec2 end;
  int region = 0;
  int lane = 0;
};

struct CoveragePlan {
  bool along_x = true;
  double swath_m = 0.0;
  std::vector<CoveragePass> passes;

  std::vector<Vec2> waypoints() const;
};

// Boustrophedon passes over the standing crop inside the fence. Lanes are
// `swath` cells wide and run parallel to the longest fence edge (axis-aligned).
// Runs on adjacent lanes that overlap form regions; each region is swept with
// alternating directions and regions are visited nearest-first from `start`.
CoveragePlan plan_coverage(const FieldGrid& field, int swath, std::optional<Vec2> start = std::nullopt);

}  // namespace reaper
