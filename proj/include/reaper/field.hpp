#pragma once

#include <cstdint>
#include <vector>

#include "reaper/geometry.hpp"

namespace reaper {

enum class Cell : std::uint8_t { StandingCrop, HarvestedLaid, BareGround, Residue, Tree, Shrub };

const char* to_string(Cell c);

// World frame: x = column direction (east), y = row direction (south), both
// in meters from the grid's top-left corner. Heading 0 faces +x and positive
// heading turns toward +y (a right turn).
struct FieldGrid {
  int rows = 0;
  int cols = 0;
  double cell_size = 0.25;
  std::vector<Cell> cells;
  // Meters; meaningful for StandingCrop, Residue, Tree and Shrub cells.
  std::vector<double> heights;
  // Fence in grid meters: lat holds y, lon holds x.
  GeoPolygon fence;

  Cell& at(int r, int c) { return cells[index(r, c)]; }
  Cell at(int r, int c) const { return cells[index(r, c)]; }
  double& height_at(int r, int c) { return heights[index(r, c)]; }
  double height_at(int r, int c) const { return heights[index(r, c)]; }

  bool contains(int r, int c) const noexcept { return r >= 0 && c >= 0 && r < rows && c < cols; }
  Vec2 cell_center(int r, int c) const noexcept { return {(c + 0.5) * cell_size, (r + 0.5) * cell_size}; }
  double width_m() const noexcept { return cols * cell_size; }
  double height_m() const noexcept { return rows * cell_size; }

  std::size_t count(Cell kind) const;
  bool inside_fence(Vec2 p) const;

 private:
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
  }
};

}  // namespace reaper
