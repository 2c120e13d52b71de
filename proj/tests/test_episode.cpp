#include "doctest.h"
#include "reaper/episode.hpp"
#include "reaper/error.hpp"

using namespace reaper;

TEST_CASE("strip fixture regression") {
  const EpisodeReport r = run_episode(strip_fixture());
  CHECK(r.frames == 94);
  CHECK(r.coverage_fraction == 1.0);
  CHECK(r.fence_violations == 0);
  CHECK(r.laid_crop_traversals == 0);
  CHECK(r.planned_passes == 1);
  CHECK(r.stop_reason == "coverage_complete");
  CHECK(r.initial_standing == 96);
  CHECK(r.harvested == 96);
}

TEST_CASE("episode is deterministic and frames reach the sink") {
  EpisodeConfig cfg = strip_fixture();
  cfg.noise_sigma = 0.02;
  int sunk = 0;
  const EpisodeReport a = run_episode(cfg, [&](const FrameRecord& rec) {
    CHECK(rec.frame.image.width() == cfg.camera.width);
    CHECK(rec.seg.classes.width() == cfg.camera.width);
    ++sunk;
  });
  const EpisodeReport b = run_episode(cfg);
  CHECK(sunk == a.frames);
  REQUIRE(a.decisions.size() == b.decisions.size());
  for (std::size_t i = 0; i < a.decisions.size(); ++i) {
    CHECK(a.decisions[i].pose.x == b.decisions[i].pose.x);
    CHECK(a.decisions[i].pose.y == b.decisions[i].pose.y);
    CHECK(a.decisions[i].action == b.decisions[i].action);
  }
}

TEST_CASE("field without standing crop stops immediately") {
  EpisodeConfig cfg = strip_fixture();
  cfg.field.crop = {0, 0, 0, 0};
  const EpisodeReport r = run_episode(cfg);
  CHECK(r.coverage_fraction == 1.0);
  CHECK(r.initial_standing == 0);
  CHECK(r.frames <= 1);
  CHECK(r.stop_reason == "no_crop");
}

TEST_CASE("fence inside the crop stops the vehicle without violations") {
  EpisodeConfig cfg = strip_fixture();
  const double w = 5.0, h = cfg.field.rows * cfg.field.cell_size;
  cfg.field.fence = GeoPolygon{{to_geo({0.25, 0.25}), to_geo({w, 0.25}), to_geo({w, h - 0.25}), to_geo({0.25, h - 0.25})}};
  const EpisodeReport r = run_episode(cfg);
  CHECK(r.fence_violations == 0);
  CHECK(r.coverage_fraction < 1.0);
  CHECK(r.harvested > 0);
  const FieldGrid g = generate_field(cfg.field);
  for (const TickLog& t : r.decisions) CHECK(g.inside_fence({t.pose.x, t.pose.y}));
  CHECK(g.inside_fence({r.final_pose.x, r.final_pose.y}));
}

TEST_CASE("harvested plus standing is conserved along a driven path") {
  EpisodeConfig cfg = two_plot_fixture();
  FieldGrid g = generate_field(cfg.field);
  const std::size_t total = g.count(Cell::StandingCrop) + g.count(Cell::HarvestedLaid);
  VehiclePose pose = *cfg.start;
  std::vector<int> prev;
  std::size_t cut = 0;
  for (int k = 0; k < 600; ++k) {
    const int idx = (k / 40) % 3 - 1;
    pose = step_vehicle(pose, {idx}, 0.6, cfg.dt, cfg.vehicle);
    cut += static_cast<std::size_t>(apply_cut(g, pose, cfg.bar, &prev).cut_count);
    REQUIRE(g.count(Cell::StandingCrop) + g.count(Cell::HarvestedLaid) == total);
  }
  CHECK(cut == g.count(Cell::HarvestedLaid));
}

TEST_CASE("episode config validation") {
  EpisodeConfig cfg = strip_fixture();
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = strip_fixture();
  cfg.k = 0;
  try {
    run_episode(cfg);
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
  }
}
