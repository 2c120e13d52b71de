#pragma once

#include <vector>

#include "reaper/image.hpp"

namespace reaper {

// Quantized gradient directions in degrees; direction is taken mod 180.
enum class Direction : std::uint8_t { Deg0 = 0, Deg45 = 45, Deg90 = 90, Deg135 = 135 };

struct GradientSample {
  double g = 0.0;
  Direction theta_q = Direction::Deg0;
};

// gx is the derivative along rows (downward), gy along columns (rightward).
// With that axis order the bucket neighbourhoods are: 0 -> north/south,
// 90 -> east/west, 45 -> north-west/south-east, 135 -> north-east/south-west.
GradientSample gradient(double gx, double gy) noexcept;

struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> g;
  std::vector<Direction> theta_q;
};

GrayImage gaussian_blur(const GrayImage& img, double sigma);
GradientField sobel_gradient(const GrayImage& img);
BinaryMask non_max_suppression(const GradientField& field);
BinaryMask hysteresis(const GradientField& field, const BinaryMask& thin, double low, double high);

BinaryMask canny(const GrayImage& img, double low, double high, double sigma);

// Per-window (mean_window - template_mean)^2 / template_mean; windows are
// clipped at the image border.
GrayImage chi_square_score(const GrayImage& img, double template_mean, int window);
BinaryMask chi_square_match(const GrayImage& img, double template_mean, int window, double tau);

struct GlcmMatrix {
  int levels = 0;
  std::vector<long> counts;  // levels x levels, row = reference pixel level
  std::vector<double> p;
  double mu_i = 0.0;
  double mu_j = 0.0;
  double sigma_i = 0.0;
  double sigma_j = 0.0;

  long count(int i, int j) const { return counts[static_cast<std::size_t>(i * levels + j)]; }
  double prob(int i, int j) const { return p[static_cast<std::size_t>(i * levels + j)]; }
  long total() const;
};

struct GlcmFeatures {
  double contrast = 0.0;
  double correlation = 0.0;
  double energy = 0.0;
  double homogeneity = 0.0;
  // Set when sigma_i * sigma_j == 0; correlation is then reported as 0.
  bool correlation_degenerate = false;
};

int quantize_level(double value, int levels) noexcept;

GlcmMatrix glcm(const GrayImage& img, Offset offset, int levels);
GlcmFeatures glcm_features(const GlcmMatrix& m);

enum class GlcmProperty { Contrast, Correlation, Energy, Homogeneity };

struct GlcmSegParams {
  int tile = 8;
  int levels = 8;
  int drow = 1;
  int dcol = 0;
  GlcmProperty property = GlcmProperty::Contrast;
  double threshold = 0.5;
  // Mark tiles whose feature is below the threshold (else above).
  bool below = true;
};

// Tile-wise GLCM feature threshold.
BinaryMask glcm_segment(const GrayImage& img, const GlcmSegParams& params);

// Threshold on one channel (2 or 3) of the modified I1I2I3 transform.
BinaryMask i1i2i3_segment(const RgbImage& img, int channel, double threshold);

}  // namespace reaper
