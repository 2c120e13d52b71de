#include "reaper/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace reaper {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ZeroTemplateMean: return "ZeroTemplateMean";
    case ErrorCode::NonpositiveDt: return "NonpositiveDt";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, const std::string& header,
               const unsigned char* payload, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload), static_cast<std::streamsize>(n));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

// Netpbm header tokenizer; '#' comments run to end of line.
class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  void expect_magic(const char* magic) {
    if (bytes_.size() < 2 || bytes_[0] != magic[0] || bytes_[1] != magic[1]) {
      throw Error(ErrorCode::MalformedHeader, "bad magic at byte offset 0");
    }
    pos_ = 2;
  }

  long read_uint() {
    skip_space_and_comments();
    std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        throw Error(ErrorCode::MalformedHeader, "number too large at byte offset " + std::to_string(start));
      }
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= bytes_.size()) {
        throw Error(ErrorCode::MalformedHeader, "header ends at byte offset " + std::to_string(pos_));
      }
      throw Error(ErrorCode::MalformedHeader, "expected integer at byte offset " + std::to_string(pos_));
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void consume_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedHeader, "expected whitespace at byte offset " + std::to_string(pos_));
    }
    ++pos_;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

struct NetpbmHeader {
  int width;
  int height;
  std::size_t data_offset;
};

NetpbmHeader parse_header(const std::vector<unsigned char>& bytes, const char* magic) {
  HeaderReader reader(bytes);
  reader.expect_magic(magic);
  std::size_t w_off = reader.offset();
  long w = reader.read_uint();
  long h = reader.read_uint();
  if (w < 1 || h < 1) {
    throw Error(ErrorCode::MalformedHeader, "zero dimension near byte offset " + std::to_string(w_off));
  }
  std::size_t max_off = reader.offset();
  long maxval = reader.read_uint();
  if (maxval != 255) {
    throw Error(ErrorCode::UnsupportedMaxval,
                "maxval " + std::to_string(maxval) + " near byte offset " + std::to_string(max_off));
  }
  reader.consume_single_space();
  return {static_cast<int>(w), static_cast<int>(h), reader.offset()};
}

void check_payload(const std::vector<unsigned char>& bytes, const NetpbmHeader& hdr, std::size_t need) {
  if (bytes.size() - hdr.data_offset < need) {
    throw Error(ErrorCode::TruncatedData, "raster ends at byte offset " + std::to_string(bytes.size()) +
                                              ", expected " + std::to_string(hdr.data_offset + need));
  }
}

}  // namespace

RgbImage load_ppm(const std::filesystem::path& path) {
  auto bytes = read_all(path);
  auto hdr = parse_header(bytes, "P6");
  std::size_t n = static_cast<std::size_t>(hdr.width) * static_cast<std::size_t>(hdr.height);
  check_payload(bytes, hdr, n * 3);
  RgbImage img(hdr.width, hdr.height);
  const unsigned char* p = bytes.data() + hdr.data_offset;
  for (std::size_t i = 0; i < n; ++i) {
    img.data()[i] = Rgb{p[3 * i], p[3 * i + 1], p[3 * i + 2]};
  }
  return img;
}

void save_ppm(const RgbImage& image, const std::filesystem::path& path) {
  std::string header = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<unsigned char> payload;
  payload.reserve(image.size() * 3);
  for (const Rgb& px : image.data()) {
    payload.push_back(px.r);
    payload.push_back(px.g);
    payload.push_back(px.b);
  }
  write_all(path, header, payload.data(), payload.size());
}

ByteImage load_pgm(const std::filesystem::path& path) {
  auto bytes = read_all(path);
  auto hdr = parse_header(bytes, "P5");
  std::size_t n = static_cast<std::size_t>(hdr.width) * static_cast<std::size_t>(hdr.height);
  check_payload(bytes, hdr, n);
  ByteImage img(hdr.width, hdr.height);
  std::copy_n(bytes.data() + hdr.data_offset, n, img.data().begin());
  return img;
}

void save_pgm(const ByteImage& image, const std::filesystem::path& path) {
  std::string header = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  write_all(path, header, image.data().data(), image.size());
}

double luminance(Rgb p) noexcept {
  return 0.299 * (p.r / 255.0) + 0.587 * (p.g / 255.0) + 0.114 * (p.b / 255.0);
}

GrayImage to_luminance(const RgbImage& image) {
  GrayImage out(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) {
    // Rounding can push white a hair above 1.
    out.data()[i] = std::min(1.0, luminance(image.data()[i]));
  }
  return out;
}

std::size_t count_set(const BinaryMask& mask) noexcept {
  std::size_t n = 0;
  for (auto v : mask.data()) n += v != 0;
  return n;
}

ByteImage mask_to_bytes(const BinaryMask& mask) {
  ByteImage out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out.data()[i] = mask.data()[i] ? 255 : 0;
  return out;
}

}  // namespace reaper
