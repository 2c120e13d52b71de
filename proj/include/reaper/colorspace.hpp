#pragma once

#include "reaper/image.hpp"

namespace reaper {

// h in degrees [0,360); s, v in [0,1].
struct HsvPixel {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

using HsvImage = Raster<HsvPixel>;

struct I1I2I3Pixel {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
};

// Hexcone conversion. Achromatic pixels get s = 0 and h = 0.
HsvPixel rgb_to_hsv(Rgb p) noexcept;
Rgb hsv_to_rgb(HsvPixel p) noexcept;

// Unrounded inverse, channels in [0,1].
void hsv_to_rgb_unit(HsvPixel p, double& r, double& g, double& b) noexcept;

HsvImage to_hsv(const RgbImage& image);

// Modified I1I2I3 plant/soil transform; inputs are channels normalized to [0,1].
I1I2I3Pixel i1i2i3_transform(double r, double g, double b) noexcept;
I1I2I3Pixel i1i2i3_transform(Rgb p) noexcept;

}  // namespace reaper
