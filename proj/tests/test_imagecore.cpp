#include <functional>
#include <random>

#include "doctest.h"
#include "reaper/error.hpp"
#include "reaper/image.hpp"
#include "test_util.hpp"

using namespace reaper;
using testutil::TempDir;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected reaper::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("raster rejects empty dimensions") {
  CHECK_THROWS_AS(RgbImage(0, 3), Error);
  CHECK_THROWS_AS(GrayImage(3, 0), Error);
  RgbImage img(4, 2);
  CHECK(img.size() == 8);
  CHECK(img.contains(1, 3));
  CHECK_FALSE(img.contains(2, 0));
}

TEST_CASE("load 1x1 black ppm") {
  TempDir dir;
  testutil::write_file(dir / "a.ppm", std::string("P6\n1 1\n255\n") + std::string(3, '\0'));
  const RgbImage img = load_ppm(dir / "a.ppm");
  CHECK(img.width() == 1);
  CHECK(img.height() == 1);
  CHECK(img.at(0, 0) == Rgb{0, 0, 0});
}

TEST_CASE("save 2x1 ppm writes canonical bytes") {
  TempDir dir;
  RgbImage img(2, 1);
  img.at(0, 0) = {255, 0, 0};
  img.at(0, 1) = {0, 255, 0};
  save_ppm(img, dir / "b.ppm");
  const std::string bytes = testutil::read_file(dir / "b.ppm");
  const std::string header = "P6\n2 1\n255\n";
  CHECK(bytes.size() == header.size() + 6);
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(bytes.substr(header.size()) == std::string("\xff\x00\x00\x00\xff\x00", 6));
}

TEST_CASE("ppm roundtrip is exact on random images") {
  TempDir dir;
  std::mt19937 rng(3);
  for (int t = 0; t < 10; ++t) {
    RgbImage img(1 + static_cast<int>(rng() % 17), 1 + static_cast<int>(rng() % 13));
    for (auto& p : img.data()) p = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
    save_ppm(img, dir / "r.ppm");
    const std::string first = testutil::read_file(dir / "r.ppm");
    const RgbImage back = load_ppm(dir / "r.ppm");
    CHECK(back == img);
    save_ppm(back, dir / "r2.ppm");
    CHECK(testutil::read_file(dir / "r2.ppm") == first);
  }
}

TEST_CASE("ppm reader tolerates header comments") {
  TempDir dir;
  testutil::write_file(dir / "c.ppm", std::string("P6\n# made by hand\n1 1 # size\n255\n") + "\x01\x02\x03");
  const RgbImage img = load_ppm(dir / "c.ppm");
  CHECK(img.at(0, 0) == Rgb{1, 2, 3});
}

TEST_CASE("ppm errors") {
  TempDir dir;
  testutil::write_file(dir / "m.ppm", std::string("P6\n1 1\n65535\n") + std::string(6, '\0'));
  CHECK(code_of([&] { load_ppm(dir / "m.ppm"); }) == ErrorCode::UnsupportedMaxval);
  testutil::write_file(dir / "h.ppm", "P3\n1 1\n255\n0 0 0\n");
  CHECK(code_of([&] { load_ppm(dir / "h.ppm"); }) == ErrorCode::MalformedHeader);
  testutil::write_file(dir / "t.ppm", std::string("P6\n2 2\n255\n") + std::string(5, '\0'));
  CHECK(code_of([&] { load_ppm(dir / "t.ppm"); }) == ErrorCode::TruncatedData);
  CHECK(code_of([&] { load_ppm(dir / "missing.ppm"); }) == ErrorCode::IoFailure);
  CHECK(code_of([&] { save_ppm(RgbImage(1, 1), dir / "no_such_dir" / "x.ppm"); }) == ErrorCode::IoFailure);
}

TEST_CASE("ppm errors name the byte offset") {
  TempDir dir;
  testutil::write_file(dir / "t.ppm", std::string("P6\n2 2\n255\n") + std::string(5, '\0'));
  try {
    load_ppm(dir / "t.ppm");
    FAIL("expected TruncatedData");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }
}

TEST_CASE("pgm roundtrip") {
  TempDir dir;
  ByteImage img(3, 2);
  for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = static_cast<std::uint8_t>(i * 40);
  save_pgm(img, dir / "g.pgm");
  CHECK(testutil::read_file(dir / "g.pgm").substr(0, 11) == "P5\n3 2\n255\n");
  CHECK(load_pgm(dir / "g.pgm") == img);
}

TEST_CASE("luminance weights") {
  CHECK(luminance({255, 255, 255}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(luminance({0, 0, 0}) == 0.0);
  CHECK(luminance({255, 0, 0}) == doctest::Approx(0.299).epsilon(1e-15));
  CHECK(luminance({0, 255, 0}) == doctest::Approx(0.587).epsilon(1e-15));
  CHECK(luminance({0, 0, 255}) == doctest::Approx(0.114).epsilon(1e-15));
}

TEST_CASE("to_luminance stays in [0,1] and is monotone per channel") {
  RgbImage img(256, 1);
  for (int v = 0; v < 256; ++v) img.at(0, v) = {static_cast<std::uint8_t>(v), 255, 255};
  const GrayImage g = to_luminance(img);
  for (int v = 0; v < 256; ++v) {
    CHECK(g.at(0, v) >= 0.0);
    CHECK(g.at(0, v) <= 1.0);
    if (v > 0) CHECK(g.at(0, v) > g.at(0, v - 1));
  }
  CHECK(g.at(0, 255) <= 1.0);
}

TEST_CASE("mirror_horizontal is an involution") {
  ByteImage img(5, 3);
  for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = static_cast<std::uint8_t>(i);
  const ByteImage m = mirror_horizontal(img);
  CHECK(m.at(0, 0) == img.at(0, 4));
  CHECK(mirror_horizontal(m) == img);
}
