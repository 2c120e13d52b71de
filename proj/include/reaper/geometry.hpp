#pragma once

#include <vector>

namespace reaper {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Closed implicitly. Coordinates are treated as planar at field scale.
struct GeoPolygon {
  std::vector<GeoPoint> vertices;
};

inline GeoPoint to_geo(Vec2 p) noexcept { return {p.y, p.x}; }
inline Vec2 to_xy(GeoPoint p) noexcept { return {p.lon, p.lat}; }

}  // namespace reaper
