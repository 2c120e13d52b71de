#include "reaper/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

namespace reaper {

const char* to_string(PixelClass c) {
  switch (c) {
    case PixelClass::Background: return "background";
    case PixelClass::Crop: return "crop";
    case PixelClass::Ground: return "ground";
  }
  return "unknown";
}

void SegParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); };
  if (!(phi1 >= 0.0 && phi1 < phi2 && phi2 < 360.0)) fail("need 0 <= phi1 < phi2 < 360");
  if (line_length < 1) fail("line_length must be >= 1");
  if (tilts.empty()) fail("tilts must be nonempty");
  for (double t : tilts) {
    if (!(t > 0.0 && t < 180.0)) fail("tilt " + std::to_string(t) + " outside (0,180)");
  }
  if (!(lum_threshold >= 0.0 && lum_threshold <= 1.0)) fail("lum_threshold must be in [0,1]");
  if (!std::isfinite(plane_a) || !std::isfinite(plane_b)) fail("plane coefficients must be finite");
}

SegParams SegParams::appendix_preset() {
  SegParams p;
  p.mode = SegMode::Appendix;
  return p;
}

double luminance_proxy(const HsvPixel& p) noexcept {
  return p.v * (1.0 - 0.5 * (1.0 - p.s));
}

namespace {

bool plane_keeps(const HsvPixel& p, const SegParams& params) noexcept {
  const double q = params.plane_a * p.s + p.v;
  return params.plane_keep_below ? q <= params.plane_b : q >= params.plane_b;
}

PixelClass classify_appendix(const HsvPixel& p, const SegParams& params) noexcept {
  const double h_unit = p.h / 360.0;
  if (p.h > params.phi2 || p.h < params.phi1 || !plane_keeps(p, params)) {
    return PixelClass::Background;
  }
  HsvPixel rewritten = p;
  if (h_unit < 0.9 * p.s) {
    rewritten.s = 0.0;
  } else {
    rewritten.h = 0.0;
    rewritten.s = 1.0;
  }
  double r, g, b;
  hsv_to_rgb_unit(rewritten, r, g, b);
  const double gray = 0.299 * r + 0.587 * g + 0.114 * b;
  return gray > params.lum_threshold ? PixelClass::Crop : PixelClass::Ground;
}

}  // namespace

PixelClass classify_pixel(const HsvPixel& p, const SegParams& params) noexcept {
  if (params.mode == SegMode::Appendix) return classify_appendix(p, params);
  if (p.h < params.phi1 || p.h > params.phi2 || !plane_keeps(p, params)) {
    return PixelClass::Background;
  }
  return luminance_proxy(p) >= params.lum_threshold ? PixelClass::Crop : PixelClass::Ground;
}

ClassMask segment_frame(const HsvImage& img, const SegParams& params) {
  ClassMask out(img.width(), img.height());
  std::transform(img.data().begin(), img.data().end(), out.data().begin(),
                 [&](const HsvPixel& p) { return classify_pixel(p, params); });
  return out;
}

BinaryMask crop_mask(const ClassMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  std::transform(mask.data().begin(), mask.data().end(), out.data().begin(),
                 [](PixelClass c) { return static_cast<std::uint8_t>(c == PixelClass::Crop); });
  return out;
}

StructElem make_line_se(int length, double tilt_deg) {
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "line length must be >= 1");
  if (!(tilt_deg >= 0.0 && tilt_deg < 180.0)) {
    throw Error(ErrorCode::InvalidArgument, "tilt must be in [0,180)");
  }
  const double rad = tilt_deg * M_PI / 180.0;
  // Rows grow downward, so an upward lean is a negative row step.
  const long span = length - 1;
  const long dr = -std::lround(span * std::sin(rad));
  const long dc = std::lround(span * std::cos(rad));
  // Integer endpoints split around the anchor; the raster is the rounded ideal
  // line through the origin, one cell per step of the major axis.
  std::set<Offset> cells;
  if (std::labs(dr) >= std::labs(dc)) {
    const long start = -(dr / 2);
    const long end = start + dr;
    const long step = dr >= 0 ? 1 : -1;
    for (long r = start;; r += step) {
      long c = dr == 0 ? 0 : std::lround(static_cast<double>(r) * dc / dr);
      cells.insert({static_cast<int>(r), static_cast<int>(c)});
      if (r == end) break;
    }
  } else {
    const long start = -(dc / 2);
    const long end = start + dc;
    const long step = dc >= 0 ? 1 : -1;
    for (long c = start;; c += step) {
      long r = std::lround(static_cast<double>(c) * dr / dc);
      cells.insert({static_cast<int>(r), static_cast<int>(c)});
      if (c == end) break;
    }
  }
  return {std::vector<Offset>(cells.begin(), cells.end())};
}

BinaryMask erode(const BinaryMask& mask, const StructElem& se) {
  const int w = mask.width();
  const int h = mask.height();
  BinaryMask out(w, h, 1);
  if (se.offsets.empty()) return out;
  for (const Offset& o : se.offsets) {
    for (int r = 0; r < h; ++r) {
      const int sr = r + o.drow;
      std::uint8_t* dst = &out.at(r, 0);
      if (sr < 0 || sr >= h) {
        std::fill(dst, dst + w, 0);
        continue;
      }
      const std::uint8_t* src = &mask.at(sr, 0);
      for (int c = 0; c < w; ++c) {
        const int sc = c + o.dcol;
        dst[c] &= (sc >= 0 && sc < w) ? static_cast<std::uint8_t>(src[sc] != 0) : 0;
      }
    }
  }
  return out;
}

BinaryMask detect_vertical(const BinaryMask& mask, const SegParams& params) {
  BinaryMask out(mask.width(), mask.height(), 0);
  for (double tilt : params.tilts) {
    BinaryMask eroded = erode(mask, make_line_se(params.line_length, tilt));
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] |= eroded.data()[i];
  }
  return out;
}

SegmentationResult run_pipeline(const RgbImage& frame, const SegParams& params) {
  SegmentationResult res;
  res.classes = segment_frame(to_hsv(frame), params);
  res.crop = crop_mask(res.classes);
  res.vertical = detect_vertical(res.crop, params);
  return res;
}

}  // namespace reaper
