#pragma once

#include <cstddef>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "reaper/error.hpp"

namespace reaper {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// (drow, dcol) displacement on a raster.
struct Offset {
  int drow = 0;
  int dcol = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
  friend auto operator<=>(const Offset&, const Offset&) = default;
};

// Row-major raster. Row 0 is the top of the image.
template <class T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "raster dimensions must be >= 1");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  T& at(int row, int col) { return data_[index(row, col)]; }
  const T& at(int row, int col) const { return data_[index(row, col)]; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using RgbImage = Raster<Rgb>;
// Samples in [0,1].
using GrayImage = Raster<double>;
// Samples in {0,1}.
using BinaryMask = Raster<std::uint8_t>;
// Raw 8-bit samples (PGM payloads, label maps).
using ByteImage = Raster<std::uint8_t>;

RgbImage load_ppm(const std::filesystem::path& path);
void save_ppm(const RgbImage& image, const std::filesystem::path& path);

ByteImage load_pgm(const std::filesystem::path& path);
void save_pgm(const ByteImage& image, const std::filesystem::path& path);

// Rec.601 luma, normalized to [0,1].
double luminance(Rgb p) noexcept;
GrayImage to_luminance(const RgbImage& image);

// Mirror left-right.
template <class T>
Raster<T> mirror_horizontal(const Raster<T>& in) {
  Raster<T> out(in.width(), in.height());
  for (int r = 0; r < in.height(); ++r) {
    for (int c = 0; c < in.width(); ++c) {
      out.at(r, in.width() - 1 - c) = in.at(r, c);
    }
  }
  return out;
}

std::size_t count_set(const BinaryMask& mask) noexcept;

// 0/1 mask to a viewable 0/255 byte image.
ByteImage mask_to_bytes(const BinaryMask& mask);

}  // namespace reaper
