#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "reaper/cli.hpp"
#include "reaper/config.hpp"
#include "test_util.hpp"

using namespace reaper;
using testutil::TempDir;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string square_trace() {
  std::string s = "lat,lon\n";
  for (int i = 0; i < 10; ++i) s += "0," + std::to_string(i * 0.1) + "\n";
  for (int i = 0; i < 10; ++i) s += std::to_string(i * 0.1) + ",1\n";
  for (int i = 0; i < 10; ++i) s += "1," + std::to_string(1 - i * 0.1) + "\n";
  for (int i = 0; i < 10; ++i) s += std::to_string(1 - i * 0.1) + ",0\n";
  return s;
}

}  // namespace

TEST_CASE("cli usage errors exit 2") {
  CHECK(cli({}).code == kExitConfig);
  CHECK(cli({"bogus"}).code == kExitConfig);
  CHECK(cli({"segment"}).code == kExitConfig);
  TempDir d;
  const Run r = cli({"baseline", "--method", "sobel", "--input", "nope.ppm", "--out", d.path().string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.rfind("reaper: ", 0) == 0);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("cli missing or malformed input exits 3") {
  TempDir d;
  CHECK(cli({"segment", "--input", (d / "none").string(), "--out", (d / "o").string()}).code == kExitInput);
  testutil::write_file(d / "bad.ppm", "P6\n2 2\n");
  CHECK(cli({"baseline", "--method", "canny", "--input", (d / "bad.ppm").string(), "--out", d.path().string()}).code ==
        kExitInput);
  CHECK(cli({"geofence", "--trace", (d / "missing.csv").string()}).code == kExitInput);
}

TEST_CASE("cli geofence compresses a square trace") {
  TempDir d;
  testutil::write_file(d / "trace.csv", square_trace());
  const Run r = cli({"geofence", "--trace", (d / "trace.csv").string(), "--eps", "0.001", "--out",
                     (d / "fence.json").string()});
  REQUIRE(r.code == kExitOk);
  const Json j = Json::parse(testutil::read_file(d / "fence.json"));
  CHECK(j.dump() + "\n" == r.out);
  CHECK(r.out.find("vertices") != std::string::npos);
  CHECK(cli({"geofence", "--trace", (d / "trace.csv").string(), "--eps", "-1"}).code == kExitConfig);

  testutil::write_file(d / "line.csv", "0,0\n1,1\n2,2\n3,3\n4,4\n");
  CHECK(cli({"geofence", "--trace", (d / "line.csv").string(), "--eps", "0.1"}).code == kExitInput);
  testutil::write_file(d / "two.csv", "0,0\n1,1\n");
  CHECK(cli({"geofence", "--trace", (d / "two.csv").string()}).code == kExitInput);
}

TEST_CASE("cli fixture frames feed segment and baseline") {
  TempDir d;
  const std::string fx = (d / "fx").string();
  REQUIRE(cli({"fixture", "--kind", "frames", "--out", fx, "--count", "2", "--seed", "3"}).code == kExitOk);
  const std::string seg_out = (d / "seg").string();
  const Run s = cli({"segment", "--input", fx + "/frames", "--labels", fx + "/labels", "--out", seg_out});
  REQUIRE(s.code == kExitOk);
  const std::string jsonl = testutil::read_file(d / "seg" / "segment.jsonl");
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 2);
  CHECK(jsonl.find("agreement") != std::string::npos);
  CHECK(std::filesystem::exists(d / "seg" / "overlay" / "frame_000001.ppm"));
  CHECK(std::filesystem::exists(d / "seg" / "vertical" / "frame_000002.pgm"));

  for (const std::string m : {"canny", "chisq", "glcm", "i1i2i3"}) {
    const Run b = cli({"baseline", "--method", m, "--input", fx + "/frames/frame_000001.ppm", "--labels",
                       fx + "/labels/frame_000001.pgm", "--out", (d / "base").string()});
    CHECK(b.code == kExitOk);
    CHECK(std::filesystem::exists(d / "base" / (m + ".pgm")));
    CHECK(std::filesystem::exists(d / "base" / (m + ".json")));
  }
  CHECK(cli({"baseline", "--method", "chisq", "--input", fx + "/frames/frame_000001.ppm", "--template-mean", "0",
             "--out", (d / "base").string()})
            .code != kExitOk);
}

TEST_CASE("cli simulate writes a report and honours overrides") {
  TempDir d;
  const Run r = cli({"simulate", "--fixture", "strip", "--out", (d / "sim").string()});
  REQUIRE(r.code == kExitOk);
  const Json rep = Json::parse(testutil::read_file(d / "sim" / "report.json"));
  CHECK(rep.at("coverage_fraction").get<double>() == 1.0);
  CHECK(rep.at("fence_violations").get<int>() == 0);
  CHECK(std::filesystem::exists(d / "sim" / "log.jsonl"));
  CHECK(std::filesystem::exists(d / "sim" / "config.json"));

  const Run capped = cli({"simulate", "--fixture", "strip", "--max-ticks", "5", "--out", (d / "cap").string()});
  CHECK(capped.code == kExitOk);
  CHECK(Json::parse(testutil::read_file(d / "cap" / "report.json")).at("frames").get<int>() == 5);

  testutil::write_file(d / "cfg.json", R"({"fixture": "strip", "max_ticks": 3})");
  const Run j = cli({"simulate", "--config", (d / "cfg.json").string(), "--max-ticks", "50", "--out",
                     (d / "json").string()});
  CHECK(j.code == kExitOk);
  CHECK(Json::parse(testutil::read_file(d / "json" / "report.json")).at("frames").get<int>() == 3);

  testutil::write_file(d / "bad.json", R"({"fixture": "strip", "no_such_key": 1})");
  CHECK(cli({"simulate", "--config", (d / "bad.json").string(), "--out", (d / "bad").string()}).code == kExitConfig);
  testutil::write_file(d / "broken.json", "{");
  CHECK(cli({"simulate", "--config", (d / "broken.json").string(), "--out", (d / "bad").string()}).code ==
        kExitConfig);
}
