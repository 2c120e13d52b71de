#include "reaper/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace reaper {

namespace {

PaintedScene blank_scene(int width, int height) {
  return {RgbImage(width, height, palette::kSky), ClassMask(width, height, PixelClass::Background),
          BinaryMask(width, height), BinaryMask(width, height), BinaryMask(width, height)};
}

void put(PaintedScene& s, int r, int c, Rgb color, PixelClass label) {
  if (!s.image.contains(r, c)) return;
  s.image.at(r, c) = color;
  s.labels.at(r, c) = label;
}

void paint_ground(PaintedScene& s, int row0, int row1) {
  for (int r = row0; r < row1; ++r) {
    for (int c = 0; c < s.image.width(); ++c) {
      put(s, r, c, r % 5 == 0 ? palette::kGroundStreak : palette::kGround, PixelClass::Ground);
    }
  }
}

// Stalk columns with ragged tops; rows [row0, row1) belong to the region.
void paint_standing(PaintedScene& s, int row0, int row1, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> jitter(0, 4);
  for (int c = 0; c < s.image.width(); ++c) {
    const bool stalk = c % 4 < 2;
    const int top = row0 + (stalk ? jitter(rng) : 0);
    for (int r = row0; r < row1; ++r) {
      s.standing.at(r, c) = 1;
      if (r < top) continue;
      if (stalk) {
        put(s, r, c, (c / 4) % 3 == 0 ? palette::kGoldenAlt : palette::kGolden, PixelClass::Crop);
      } else {
        put(s, r, c, palette::kStalkGap, PixelClass::Ground);
      }
    }
  }
}

}  // namespace

PaintedScene standing_laid_scene(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PaintedScene s = blank_scene(width, height);
  const int horizon = height / 6;
  const int split = height * 7 / 12;
  paint_standing(s, horizon, split, rng);
  // Laid straw: horizontal golden runs broken by short dark gaps.
  std::uniform_int_distribution<int> straw_len(10, 30), gap_len(2, 6);
  for (int r = split; r < height; ++r) {
    const bool straw_row = r % 4 < 2;
    bool straw = true;
    for (int c = 0; c < width;) {
      const int end = std::min(width, c + (straw ? straw_len(rng) : gap_len(rng)));
      for (; c < end; ++c) {
        s.laid.at(r, c) = 1;
        if (straw_row && straw) {
          put(s, r, c, palette::kGolden, PixelClass::Crop);
        } else {
          put(s, r, c, palette::kStalkGap, PixelClass::Ground);
        }
      }
      straw = !straw;
    }
  }
  return s;
}

PaintedScene residue_scene(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PaintedScene s = blank_scene(width, height);
  const int horizon = height / 6;
  const int split = height * 7 / 12;
  paint_standing(s, horizon, split, rng);
  paint_ground(s, split, height);
  for (int r = split; r < height; ++r) {
    for (int c = 0; c < width; ++c) s.residue.at(r, c) = 1;
  }
  // Cut stalks a few pixels tall on a jittered lattice.
  std::uniform_int_distribution<int> dr(0, 3), dc(0, 1), tall(4, 6);
  for (int r0 = split + 2; r0 + 8 < height; r0 += 10) {
    for (int c0 = 0; c0 + 2 < width; c0 += 5) {
      const int rr = r0 + dr(rng), cc = c0 + dc(rng), len = tall(rng);
      for (int r = rr; r < rr + len; ++r) {
        put(s, r, cc, palette::kGolden, PixelClass::Crop);
        put(s, r, cc + 1, palette::kGolden, PixelClass::Crop);
      }
    }
  }
  return s;
}

RenderedFrame labeled_frame(std::uint64_t seed, int width, int height, double noise_sigma) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  FieldSpec spec;
  spec.rows = 48;
  spec.cols = 64;
  spec.crop = {8, 16, 32, 40};
  spec.plot_count = pick(1, 2);
  spec.plot_gap = spec.plot_count > 1 ? pick(4, 10) : 0;
  spec.seed = seed;
  spec.laid = {{pick(8, 20), 16, pick(2, 8), pick(4, 14)}};
  spec.residue = {{pick(20, 34), pick(16, 30), pick(2, 6), pick(3, 10)}};
  spec.trees = {{pick(0, 3), pick(0, 60), 2, 2}, {pick(44, 46), pick(0, 60), 2, 2}};
  spec.shrubs = {{pick(4, 6), pick(2, 12), 1, 2}};
  const FieldGrid field = generate_field(spec);

  VehiclePose pose;
  pose.x = uni(1.0, 3.2);
  pose.y = uni(3.0, 9.0);
  pose.heading = uni(-0.6, 0.6);

  CameraModel cam;
  cam.width = width;
  cam.height = height;
  cam.focal = width * 0.625;
  cam.pitch = uni(0.1, 0.35);

  RenderOptions opt;
  opt.noise_sigma = noise_sigma;
  opt.noise_seed = seed ^ 0x9e3779b97f4a7c15ULL;
  return render_frame(field, pose, cam, opt);
}

}  // namespace reaper
