#pragma once

#include <cstdint>

#include "reaper/fieldsim.hpp"
#include "reaper/image.hpp"
#include "reaper/segmentation.hpp"

namespace reaper {

// A flat painted frame with exact region masks.
struct PaintedScene {
  RgbImage image;
  ClassMask labels;
  BinaryMask standing;
  BinaryMask laid;
  BinaryMask residue;
};

// Sky band, standing crop (vertical stalk streaks) over laid crop (horizontal
// streaks).
PaintedScene standing_laid_scene(int width = 320, int height = 240, std::uint64_t seed = 1);

// Sky band, standing crop over brown ground scattered with short residue
// stalks.
PaintedScene residue_scene(int width = 320, int height = 240, std::uint64_t seed = 1);

// A rendered view of a seeded random field (laid patch, residue patch, trees)
// from a random pose on the headland.
RenderedFrame labeled_frame(std::uint64_t seed, int width = 320, int height = 240, double noise_sigma = 0.0);

}  // namespace reaper
