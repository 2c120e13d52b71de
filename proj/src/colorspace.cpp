#include "reaper/colorspace.hpp"

#include <algorithm>
#include <cmath>

namespace reaper {

HsvPixel rgb_to_hsv(Rgb p) noexcept {
  const double r = p.r / 255.0;
  const double g = p.g / 255.0;
  const double b = p.b / 255.0;
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double delta = max - min;

  HsvPixel out;
  out.v = max;
  if (delta <= 0.0) return out;
  out.s = delta / max;

  double sector;
  if (max == r) {
    sector = (g - b) / delta;
    sector -= 6.0 * std::floor(sector / 6.0);
  } else if (max == g) {
    sector = (b - r) / delta + 2.0;
  } else {
    sector = (r - g) / delta + 4.0;
  }
  out.h = 60.0 * sector;
  if (out.h >= 360.0) out.h -= 360.0;
  return out;
}

void hsv_to_rgb_unit(HsvPixel p, double& r, double& g, double& b) noexcept {
  const double v = p.v;
  if (p.s <= 0.0) {
    r = g = b = v;
    return;
  }
  double h = p.h / 60.0;
  h -= 6.0 * std::floor(h / 6.0);
  const int sector = std::min(5, static_cast<int>(h));
  const double f = h - sector;
  const double pp = v * (1.0 - p.s);
  const double q = v * (1.0 - p.s * f);
  const double t = v * (1.0 - p.s * (1.0 - f));
  switch (sector) {
    case 0: r = v; g = t; b = pp; break;
    case 1: r = q; g = v; b = pp; break;
    case 2: r = pp; g = v; b = t; break;
    case 3: r = pp; g = q; b = v; break;
    case 4: r = t; g = pp; b = v; break;
    default: r = v; g = pp; b = q; break;
  }
}

Rgb hsv_to_rgb(HsvPixel p) noexcept {
  double r, g, b;
  hsv_to_rgb_unit(p, r, g, b);
  auto to_byte = [](double x) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(x * 255.0), 0L, 255L));
  };
  return {to_byte(r), to_byte(g), to_byte(b)};
}

HsvImage to_hsv(const RgbImage& image) {
  HsvImage out(image.width(), image.height());
  std::transform(image.data().begin(), image.data().end(), out.data().begin(), rgb_to_hsv);
  return out;
}

I1I2I3Pixel i1i2i3_transform(double r, double g, double b) noexcept {
  return {0.34 * r + 0.33 * g + 0.33 * b,
          0.07 * r + 0.39 * g - 0.54 * b,
          -0.35 * r + 0.51 * g - 0.14 * b};
}

I1I2I3Pixel i1i2i3_transform(Rgb p) noexcept {
  return i1i2i3_transform(p.r / 255.0, p.g / 255.0, p.b / 255.0);
}

}  // namespace reaper
