#pragma once

#include <cstdint>
#include <vector>

#include "reaper/colorspace.hpp"
#include "reaper/image.hpp"

namespace reaper {

enum class PixelClass : std::uint8_t { Background = 0, Crop = 1, Ground = 2 };

const char* to_string(PixelClass c);

using ClassMask = Raster<PixelClass>;

enum class SegMode {
  // Hue band + plane 3 + luminance proxy on the retained HSV pixel.
  Prose,
  // Replays the reference MATLAB branch structure, re-renders to RGB and
  // thresholds gray strictly above lum_threshold.
  Appendix,
};

// Angles in degrees. The reference code uses a [0,1] hue scale: 0.18 there is
// 0.18 * 360 = 64.8 degrees here.
struct SegParams {
  double phi1 = 0.0;
  double phi2 = 64.8;
  // Plane 3: a * s + v compared against b. Defaults reject s < 0.1 * v.
  double plane_a = -10.0;
  double plane_b = 0.0;
  bool plane_keep_below = true;
  double lum_threshold = 0.45;
  int line_length = 10;
  std::vector<double> tilts{80.0, 85.0, 90.0, 95.0, 100.0};
  SegMode mode = SegMode::Prose;

  // Throws Error(ConfigInvalid) when an invariant is violated.
  void validate() const;

  static SegParams appendix_preset();
};

// Offsets relative to an anchor at (0,0).
struct StructElem {
  std::vector<Offset> offsets;
};

// Luminance proxy used by the prose rule to split crop from ground.
double luminance_proxy(const HsvPixel& p) noexcept;

PixelClass classify_pixel(const HsvPixel& p, const SegParams& params) noexcept;
ClassMask segment_frame(const HsvImage& img, const SegParams& params);
BinaryMask crop_mask(const ClassMask& mask);

// Line of `length` cells through the anchor at `tilt` degrees from horizontal
// (90 = vertical, leaning right for tilts below 90).
StructElem make_line_se(int length, double tilt_deg);

// Out-of-bounds neighbours count as background.
BinaryMask erode(const BinaryMask& mask, const StructElem& se);

// Union of erosions over params.tilts.
BinaryMask detect_vertical(const BinaryMask& mask, const SegParams& params);

// Convenience: RGB frame through every stage.
struct SegmentationResult {
  ClassMask classes;
  BinaryMask crop;
  BinaryMask vertical;
};

SegmentationResult run_pipeline(const RgbImage& frame, const SegParams& params);

}  // namespace reaper
