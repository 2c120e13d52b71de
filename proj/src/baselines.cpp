#include "reaper/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reaper/colorspace.hpp"

namespace reaper {

GradientSample gradient(double gx, double gy) noexcept {
  GradientSample s;
  s.g = std::sqrt(gx * gx + gy * gy);
  if (s.g == 0.0) return s;
  double theta = std::atan2(gy, gx) * 180.0 / M_PI;
  theta -= 180.0 * std::floor(theta / 180.0);
  const int bucket = static_cast<int>(std::lround(theta / 45.0)) % 4;
  s.theta_q = static_cast<Direction>(bucket * 45);
  return s;
}

namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

}  // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double k = std::exp(-(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = k;
    sum += k;
  }
  for (double& k : kernel) k /= sum;

  const int w = img.width();
  const int h = img.height();
  GrayImage tmp(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * img.at(r, clamp_index(c + i, w));
      }
      tmp.at(r, c) = acc;
    }
  }
  GrayImage out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(clamp_index(r + i, h), c);
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

GradientField sobel_gradient(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  GradientField f;
  f.width = w;
  f.height = h;
  f.g.resize(img.size());
  f.theta_q.resize(img.size());
  auto px = [&](int r, int c) { return img.at(clamp_index(r, h), clamp_index(c, w)); };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double gx = (px(r + 1, c - 1) + 2.0 * px(r + 1, c) + px(r + 1, c + 1)) -
                        (px(r - 1, c - 1) + 2.0 * px(r - 1, c) + px(r - 1, c + 1));
      const double gy = (px(r - 1, c + 1) + 2.0 * px(r, c + 1) + px(r + 1, c + 1)) -
                        (px(r - 1, c - 1) + 2.0 * px(r, c - 1) + px(r + 1, c - 1));
      const auto s = gradient(gx, gy);
      const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c);
      f.g[i] = s.g;
      f.theta_q[i] = s.theta_q;
    }
  }
  return f;
}

BinaryMask non_max_suppression(const GradientField& field) {
  const int w = field.width;
  const int h = field.height;
  BinaryMask out(w, h, 0);
  auto mag = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= h || c >= w) return 0.0;
    return field.g[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)];
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double g = mag(r, c);
      if (g <= 0.0) continue;
      int dr = 0, dc = 0;
      switch (field.theta_q[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)]) {
        case Direction::Deg0: dr = 1; dc = 0; break;     // north / south
        case Direction::Deg90: dr = 0; dc = 1; break;    // west / east
        case Direction::Deg45: dr = 1; dc = 1; break;    // north-west / south-east
        case Direction::Deg135: dr = 1; dc = -1; break;  // north-east / south-west
      }
      // Strict on one side, non-strict on the other, so plateaus of width two
      // keep exactly one pixel.
      if (g > mag(r - dr, c - dc) && g >= mag(r + dr, c + dc)) out.at(r, c) = 1;
    }
  }
  return out;
}

BinaryMask hysteresis(const GradientField& field, const BinaryMask& thin, double low, double high) {
  const int w = field.width;
  const int h = field.height;
  BinaryMask out(w, h, 0);
  std::vector<std::pair<int, int>> stack;
  auto g = [&](int r, int c) {
    return field.g[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)];
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (thin.at(r, c) && g(r, c) >= high && !out.at(r, c)) {
        out.at(r, c) = 1;
        stack.emplace_back(r, c);
        while (!stack.empty()) {
          auto [cr, cc] = stack.back();
          stack.pop_back();
          for (int nr = cr - 1; nr <= cr + 1; ++nr) {
            for (int nc = cc - 1; nc <= cc + 1; ++nc) {
              if (!out.contains(nr, nc) || out.at(nr, nc)) continue;
              if (thin.at(nr, nc) && g(nr, nc) >= low) {
                out.at(nr, nc) = 1;
                stack.emplace_back(nr, nc);
              }
            }
          }
        }
      }
    }
  }
  return out;
}

BinaryMask canny(const GrayImage& img, double low, double high, double sigma) {
  if (!(low >= 0.0 && low <= high)) {
    throw Error(ErrorCode::InvalidArgument, "canny thresholds need 0 <= low <= high");
  }
  const auto field = sobel_gradient(gaussian_blur(img, sigma));
  return hysteresis(field, non_max_suppression(field), low, high);
}

GrayImage chi_square_score(const GrayImage& img, double template_mean, int window) {
  if (!(template_mean > 0.0)) throw Error(ErrorCode::ZeroTemplateMean, "template mean must be > 0");
  if (window < 1 || window % 2 == 0) throw Error(ErrorCode::InvalidArgument, "window must be odd");
  const int w = img.width();
  const int h = img.height();
  // Summed-area table with a zero guard row and column.
  std::vector<double> sat(static_cast<std::size_t>((w + 1) * (h + 1)), 0.0);
  auto S = [&](int r, int c) -> double& { return sat[static_cast<std::size_t>(r * (w + 1) + c)]; };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      S(r + 1, c + 1) = img.at(r, c) + S(r, c + 1) + S(r + 1, c) - S(r, c);
    }
  }
  const int half = window / 2;
  GrayImage out(w, h);
  for (int r = 0; r < h; ++r) {
    const int r0 = std::max(0, r - half), r1 = std::min(h, r + half + 1);
    for (int c = 0; c < w; ++c) {
      const int c0 = std::max(0, c - half), c1 = std::min(w, c + half + 1);
      const double sum = S(r1, c1) - S(r0, c1) - S(r1, c0) + S(r0, c0);
      const double mean = sum / ((r1 - r0) * (c1 - c0));
      const double diff = mean - template_mean;
      out.at(r, c) = diff * diff / template_mean;
    }
  }
  return out;
}

BinaryMask chi_square_match(const GrayImage& img, double template_mean, int window, double tau) {
  const auto score = chi_square_score(img, template_mean, window);
  BinaryMask out(img.width(), img.height());
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = score.data()[i] <= tau;
  return out;
}

long GlcmMatrix::total() const {
  long t = 0;
  for (long c : counts) t += c;
  return t;
}

int quantize_level(double value, int levels) noexcept {
  const int q = static_cast<int>(std::floor(value * levels));
  return std::clamp(q, 0, levels - 1);
}

GlcmMatrix glcm(const GrayImage& img, Offset offset, int levels) {
  if (levels < 2) throw Error(ErrorCode::InvalidArgument, "glcm needs levels >= 2");
  if (offset.drow == 0 && offset.dcol == 0) throw Error(ErrorCode::InvalidArgument, "glcm offset must be nonzero");
  GlcmMatrix m;
  m.levels = levels;
  const auto n = static_cast<std::size_t>(levels * levels);
  m.counts.assign(n, 0);
  m.p.assign(n, 0.0);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      const int r2 = r + offset.drow, c2 = c + offset.dcol;
      if (!img.contains(r2, c2)) continue;
      const int i = quantize_level(img.at(r, c), levels);
      const int j = quantize_level(img.at(r2, c2), levels);
      ++m.counts[static_cast<std::size_t>(i * levels + j)];
    }
  }
  const long total = m.total();
  if (total == 0) return m;
  for (std::size_t k = 0; k < n; ++k) m.p[k] = static_cast<double>(m.counts[k]) / static_cast<double>(total);
  for (int i = 0; i < levels; ++i) {
    for (int j = 0; j < levels; ++j) {
      m.mu_i += i * m.prob(i, j);
      m.mu_j += j * m.prob(i, j);
    }
  }
  double var_i = 0.0, var_j = 0.0;
  for (int i = 0; i < levels; ++i) {
    for (int j = 0; j < levels; ++j) {
      var_i += (i - m.mu_i) * (i - m.mu_i) * m.prob(i, j);
      var_j += (j - m.mu_j) * (j - m.mu_j) * m.prob(i, j);
    }
  }
  m.sigma_i = std::sqrt(var_i);
  m.sigma_j = std::sqrt(var_j);
  return m;
}

GlcmFeatures glcm_features(const GlcmMatrix& m) {
  if (m.total() <= 0) throw Error(ErrorCode::InvalidArgument, "glcm has no pairs");
  GlcmFeatures f;
  double cov = 0.0;
  for (int i = 0; i < m.levels; ++i) {
    for (int j = 0; j < m.levels; ++j) {
      const double p = m.prob(i, j);
      const int d = std::abs(i - j);
      f.contrast += d * d * p;
      f.energy += p * p;
      f.homogeneity += p / (1.0 + d);
      cov += (i - m.mu_i) * (j - m.mu_j) * p;
    }
  }
  const double denom = m.sigma_i * m.sigma_j;
  if (denom > 0.0) {
    f.correlation = cov / denom;
  } else {
    f.correlation_degenerate = true;
  }
  return f;
}

namespace {

double pick(const GlcmFeatures& f, GlcmProperty p) {
  switch (p) {
    case GlcmProperty::Contrast: return f.contrast;
    case GlcmProperty::Correlation: return f.correlation;
    case GlcmProperty::Energy: return f.energy;
    case GlcmProperty::Homogeneity: return f.homogeneity;
  }
  return 0.0;
}

}  // namespace

BinaryMask glcm_segment(const GrayImage& img, const GlcmSegParams& params) {
  if (params.tile < 2) throw Error(ErrorCode::InvalidArgument, "glcm tile must be >= 2");
  BinaryMask out(img.width(), img.height(), 0);
  for (int r0 = 0; r0 < img.height(); r0 += params.tile) {
    for (int c0 = 0; c0 < img.width(); c0 += params.tile) {
      const int th = std::min(params.tile, img.height() - r0);
      const int tw = std::min(params.tile, img.width() - c0);
      GrayImage tile(tw, th);
      for (int r = 0; r < th; ++r)
        for (int c = 0; c < tw; ++c) tile.at(r, c) = img.at(r0 + r, c0 + c);
      const auto m = glcm(tile, {params.drow, params.dcol}, params.levels);
      if (m.total() == 0) continue;
      const double v = pick(glcm_features(m), params.property);
      const bool hit = params.below ? v < params.threshold : v > params.threshold;
      if (!hit) continue;
      for (int r = 0; r < th; ++r)
        for (int c = 0; c < tw; ++c) out.at(r0 + r, c0 + c) = 1;
    }
  }
  return out;
}

BinaryMask i1i2i3_segment(const RgbImage& img, int channel, double threshold) {
  if (channel != 2 && channel != 3) throw Error(ErrorCode::InvalidArgument, "i1i2i3 channel must be 2 or 3");
  BinaryMask out(img.width(), img.height());
  for (std::size_t k = 0; k < img.size(); ++k) {
    const auto t = i1i2i3_transform(img.data()[k]);
    out.data()[k] = (channel == 2 ? t.i2 : t.i3) >= threshold;
  }
  return out;
}

}  // namespace reaper
