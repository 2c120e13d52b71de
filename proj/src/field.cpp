#include "reaper/field.hpp"

#include <algorithm>

#include "reaper/navigation.hpp"

namespace reaper {

const char* to_string(Cell c) {
  switch (c) {
    case Cell::StandingCrop: return "standing_crop";
    case Cell::HarvestedLaid: return "harvested_laid";
    case Cell::BareGround: return "bare_ground";
    case Cell::Residue: return "residue";
    case Cell::Tree: return "tree";
    case Cell::Shrub: return "shrub";
  }
  return "unknown";
}

std::size_t FieldGrid::count(Cell kind) const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), kind));
}

bool FieldGrid::inside_fence(Vec2 p) const {
  if (fence.vertices.empty()) return p.x >= 0.0 && p.y >= 0.0 && p.x <= width_m() && p.y <= height_m();
  return point_in_polygon(fence, to_geo(p));
}

}  // namespace reaper
