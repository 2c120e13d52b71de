#include "reaper/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "reaper/error.hpp"

namespace reaper {

const char* to_string(NavAction a) {
  switch (a) {
    case NavAction::SteerLeft: return "steer_left";
    case NavAction::Straight: return "straight";
    case NavAction::SteerRight: return "steer_right";
    case NavAction::TurnAtSeparation: return "turn_at_separation";
    case NavAction::Stop: return "stop";
  }
  return "unknown";
}

std::optional<Centroid> centroid(const BinaryMask& mask) {
  double sr = 0.0, sc = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(r, c)) continue;
      sr += r;
      sc += c;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return Centroid{sr / static_cast<double>(n), sc / static_cast<double>(n)};
}

NavDecision region_decision(std::optional<double> col, int width) {
  if (width < 3) throw Error(ErrorCode::InvalidArgument, "region_decision needs width >= 3");
  if (!col) return {NavAction::Stop};
  const double x = *col + 0.5;
  if (x < width / 3.0) return {NavAction::SteerLeft};
  if (x > 2.0 * width / 3.0) return {NavAction::SteerRight};
  return {NavAction::Straight};
}

RoofProfile crop_roof(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::optional<int>> raw(static_cast<std::size_t>(w));
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      if (mask.at(r, c)) {
        raw[static_cast<std::size_t>(c)] = h - r;
        break;
      }
    }
  }
  RoofProfile out;
  out.image_height = h;
  out.heights.resize(static_cast<std::size_t>(w));
  std::vector<int> window;
  for (int c = 0; c < w; ++c) {
    if (!raw[static_cast<std::size_t>(c)]) continue;
    window.clear();
    for (int k = std::max(0, c - 2); k <= std::min(w - 1, c + 2); ++k) {
      if (raw[static_cast<std::size_t>(k)]) window.push_back(*raw[static_cast<std::size_t>(k)]);
    }
    // Lower median for even counts.
    auto mid = window.begin() + static_cast<std::ptrdiff_t>((window.size() - 1) / 2);
    std::nth_element(window.begin(), mid, window.end());
    out.heights[static_cast<std::size_t>(c)] = *mid;
  }
  return out;
}

double roof_center_median(const RoofProfile& roof) {
  const int w = static_cast<int>(roof.heights.size());
  std::vector<double> vals;
  for (int c = w / 3; c < (2 * w) / 3; ++c) {
    if (roof.heights[static_cast<std::size_t>(c)]) vals.push_back(*roof.heights[static_cast<std::size_t>(c)]);
  }
  if (vals.empty()) return 0.0;
  std::sort(vals.begin(), vals.end());
  const std::size_t n = vals.size();
  return n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

bool detect_separation(std::span<const RoofProfile> history, double rho, int k) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must be in (0,1)");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const int n = static_cast<int>(history.size());
  if (n < k + 1) return false;
  double reference = 0.0;
  for (int i = std::max(0, n - 2 * k); i < n - k; ++i) {
    reference = std::max(reference, roof_center_median(history[static_cast<std::size_t>(i)]));
  }
  if (reference <= 0.0) return false;
  const double limit = (1.0 - rho) * reference;
  if (roof_center_median(history[static_cast<std::size_t>(n - k - 1)]) <= limit) return false;
  for (int i = n - k; i < n; ++i) {
    if (roof_center_median(history[static_cast<std::size_t>(i)]) > limit) return false;
  }
  return true;
}

SeparationMonitor::SeparationMonitor(double rho, int k) : rho_(rho), k_(k) {
  if (!(rho > 0.0 && rho < 1.0) || k < 1) {
    throw Error(ErrorCode::InvalidArgument, "separation monitor needs rho in (0,1) and k >= 1");
  }
}

bool SeparationMonitor::push(RoofProfile roof) {
  last_median_ = roof_center_median(roof);
  history_.push_back(std::move(roof));
  while (static_cast<int>(history_.size()) > 2 * k_) history_.pop_front();
  std::vector<RoofProfile> view(history_.begin(), history_.end());
  return detect_separation(view, rho_, k_);
}

double polygon_area(const GeoPolygon& poly) {
  double a = 0.0;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % n];
    a += p.lon * q.lat - q.lon * p.lat;
  }
  return 0.5 * a;
}

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p, double tol) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y) <= tol;
  if (std::abs(cross(a, b, p)) / len > tol) return false;
  return p.x >= std::min(a.x, b.x) - tol && p.x <= std::max(a.x, b.x) + tol &&
         p.y >= std::min(a.y, b.y) - tol && p.y <= std::max(a.y, b.y) + tol;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  return on_segment(c, d, a, 0.0) || on_segment(c, d, b, 0.0) || on_segment(a, b, c, 0.0) ||
         on_segment(a, b, d, 0.0);
}

double segment_distance(Vec2 a, Vec2 b, Vec2 p) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

void validate_polygon(const GeoPolygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) throw Error(ErrorCode::DegeneratePolygon, "polygon needs >= 3 vertices");
  if (polygon_area(poly) == 0.0) throw Error(ErrorCode::DegeneratePolygon, "polygon has zero area");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_cross(to_xy(v[i]), to_xy(v[(i + 1) % n]), to_xy(v[j]), to_xy(v[(j + 1) % n]))) {
        throw Error(ErrorCode::DegeneratePolygon, "polygon edges " + std::to_string(i) + " and " +
                                                      std::to_string(j) + " intersect");
      }
    }
  }
}

bool point_in_polygon(const GeoPolygon& poly, GeoPoint gp) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3 || polygon_area(poly) == 0.0) {
    throw Error(ErrorCode::DegeneratePolygon, "point_in_polygon needs a polygon with area");
  }
  const Vec2 p = to_xy(gp);
  // Scale-aware edge tolerance.
  double scale = 0.0;
  for (const auto& q : v) scale = std::max({scale, std::abs(q.lat), std::abs(q.lon)});
  const double tol = 1e-12 * std::max(1.0, scale);
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = to_xy(v[i]), b = to_xy(v[j]);
    if (on_segment(a, b, p, tol)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

GeoPolygon compress_boundary(std::span<const GeoPoint> trace, double eps) {
  if (trace.size() < 3) throw Error(ErrorCode::TooFewPoints, "boundary trace needs >= 3 points");
  std::vector<GeoPoint> pts(trace.begin(), trace.end());
  if (eps <= 0.0) return {pts};
  if (pts.size() > 3 && pts.front() == pts.back()) pts.pop_back();
  const std::size_t n = pts.size();
  std::vector<Vec2> xy(n);
  std::transform(pts.begin(), pts.end(), xy.begin(), to_xy);

  Vec2 mean{};
  for (const auto& p : xy) {
    mean.x += p.x / static_cast<double>(n);
    mean.y += p.y / static_cast<double>(n);
  }
  auto farthest_from = [&](Vec2 o) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::hypot(xy[i].x - o.x, xy[i].y - o.y);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  const std::size_t a = farthest_from(mean);
  const std::size_t b = farthest_from(xy[a]);

  std::vector<bool> keep(n, false);
  keep[a] = keep[b] = true;
  // Simplify the ring chain from `from` forward to `to`.
  auto simplify_chain = [&](std::size_t from, std::size_t to) {
    const std::size_t len = (to + n - from) % n;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, len}};
    while (!stack.empty()) {
      auto [lo, hi] = stack.back();
      stack.pop_back();
      if (hi <= lo + 1) continue;
      const Vec2 pa = xy[(from + lo) % n], pb = xy[(from + hi) % n];
      double dmax = -1.0;
      std::size_t imax = lo;
      for (std::size_t i = lo + 1; i < hi; ++i) {
        const double d = segment_distance(pa, pb, xy[(from + i) % n]);
        if (d > dmax) {
          dmax = d;
          imax = i;
        }
      }
      if (dmax > eps) {
        keep[(from + imax) % n] = true;
        stack.emplace_back(lo, imax);
        stack.emplace_back(imax, hi);
      }
    }
  };
  if (a != b) {
    simplify_chain(a, b);
    simplify_chain(b, a);
  }

  // The two anchors are extreme points but can still sit mid-edge; drop one
  // when every point it spans stays within eps of the bridging segment.
  for (std::size_t anchor : {a, b}) {
    if (std::count(keep.begin(), keep.end(), true) <= 3) break;
    std::size_t prev = (anchor + n - 1) % n;
    while (!keep[prev]) prev = (prev + n - 1) % n;
    std::size_t next = (anchor + 1) % n;
    while (!keep[next]) next = (next + 1) % n;
    bool removable = true;
    for (std::size_t i = (prev + 1) % n; i != next; i = (i + 1) % n) {
      if (segment_distance(xy[prev], xy[next], xy[i]) > eps) {
        removable = false;
        break;
      }
    }
    if (removable) keep[anchor] = false;
  }

  GeoPolygon out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.vertices.push_back(pts[i]);
  }
  return out;
}

std::vector<Vec2> CoveragePlan::waypoints() const {
  std::vector<Vec2> out;
  for (const auto& p : passes) {
    out.push_back(p.start);
    out.push_back(p.end);
  }
  return out;
}

namespace {

struct Run {
  int lane;
  int lo;  // inclusive major index
  int hi;  // inclusive major index
  int region = -1;
};

int find_root(std::vector<int>& parent, int i) {
  while (parent[static_cast<std::size_t>(i)] != i) {
    parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
    i = parent[static_cast<std::size_t>(i)];
  }
  return i;
}

}  // namespace

CoveragePlan plan_coverage(const FieldGrid& field, int swath, std::optional<Vec2> start) {
  if (swath < 1) throw Error(ErrorCode::InvalidArgument, "swath must be >= 1");
  const auto& fv = field.fence.vertices;
  bool along_x = true;
  if (fv.size() >= 2) {
    double best = -1.0;
    for (std::size_t i = 0; i < fv.size(); ++i) {
      const Vec2 a = to_xy(fv[i]), b = to_xy(fv[(i + 1) % fv.size()]);
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      if (len > best) {
        best = len;
        along_x = std::abs(b.x - a.x) >= std::abs(b.y - a.y);
      }
    }
  }
  const int n_major = along_x ? field.cols : field.rows;
  const int n_minor = along_x ? field.rows : field.cols;
  const double cs = field.cell_size;
  auto cell_rc = [&](int major, int minor) { return along_x ? std::pair{minor, major} : std::pair{major, minor}; };
  auto eligible = [&](int major, int minor) {
    auto [r, c] = cell_rc(major, minor);
    return field.at(r, c) == Cell::StandingCrop && field.inside_fence(field.cell_center(r, c));
  };
  auto to_world = [&](double major_m, double minor_m) {
    return along_x ? Vec2{major_m, minor_m} : Vec2{minor_m, major_m};
  };

  int m0 = n_minor, m1 = -1;
  for (int mi = 0; mi < n_minor; ++mi) {
    for (int ma = 0; ma < n_major; ++ma) {
      if (eligible(ma, mi)) {
        m0 = std::min(m0, mi);
        m1 = std::max(m1, mi);
      }
    }
  }
  if (m1 < 0) throw Error(ErrorCode::EmptyField, "no standing crop inside the fence");
  const int lanes = (m1 - m0) / swath + 1;

  std::vector<Run> runs;
  for (int lane = 0; lane < lanes; ++lane) {
    const int lane_lo = m0 + lane * swath;
    const int lane_hi = std::min(n_minor - 1, lane_lo + swath - 1);
    int open = -1;
    for (int ma = 0; ma <= n_major; ++ma) {
      bool any = false;
      if (ma < n_major) {
        for (int mi = lane_lo; mi <= lane_hi && !any; ++mi) any = eligible(ma, mi);
      }
      if (any && open < 0) open = ma;
      if (!any && open >= 0) {
        runs.push_back({lane, open, ma - 1});
        open = -1;
      }
    }
  }

  std::vector<int> parent(runs.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      if (runs[j].lane != runs[i].lane + 1) continue;
      if (runs[i].lo <= runs[j].hi && runs[j].lo <= runs[i].hi) {
        parent[static_cast<std::size_t>(find_root(parent, static_cast<int>(i)))] = find_root(parent, static_cast<int>(j));
      }
    }
  }
  std::map<int, int> region_ids;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int root = find_root(parent, static_cast<int>(i));
    auto [it, inserted] = region_ids.emplace(root, static_cast<int>(region_ids.size()));
    runs[i].region = it->second;
  }

  // Endpoint on the lane center; pulled back inside the fence when an edge
  // or lane center pokes out.
  auto endpoint = [&](const Run& run, bool at_hi) {
    const int lane_lo = m0 + run.lane * swath;
    const int lane_hi = std::min(n_minor - 1, lane_lo + swath - 1);
    const double center = (lane_lo + (lane_hi - lane_lo + 1) / 2.0) * cs;
    const int cell = at_hi ? run.hi : run.lo;
    const double edge = at_hi ? (cell + 1) * cs : cell * cs;
    Vec2 p = to_world(edge, center);
    if (field.inside_fence(p)) return p;
    p = to_world((cell + 0.5) * cs, center);
    if (field.inside_fence(p)) return p;
    for (int mi = lane_lo; mi <= lane_hi; ++mi) {
      if (eligible(cell, mi)) return to_world((cell + 0.5) * cs, (mi + 0.5) * cs);
    }
    return p;
  };

  CoveragePlan plan;
  plan.along_x = along_x;
  plan.swath_m = swath * cs;
  const int n_regions = static_cast<int>(region_ids.size());
  std::vector<bool> done(static_cast<std::size_t>(n_regions), false);
  Vec2 pos = start.value_or(endpoint(runs.front(), false));
  auto dist = [](Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); };

  for (int visited = 0; visited < n_regions; ++visited) {
    // Nearest entry among unvisited regions: first or last lane, either end.
    int best_region = -1;
    bool best_from_last_lane = false, best_forward = true;
    double best_d = std::numeric_limits<double>::infinity();
    for (int reg = 0; reg < n_regions; ++reg) {
      if (done[static_cast<std::size_t>(reg)]) continue;
      int first_lane = std::numeric_limits<int>::max(), last_lane = -1;
      for (const auto& r : runs) {
        if (r.region != reg) continue;
        first_lane = std::min(first_lane, r.lane);
        last_lane = std::max(last_lane, r.lane);
      }
      for (bool from_last : {false, true}) {
        const int lane = from_last ? last_lane : first_lane;
        for (const auto& r : runs) {
          if (r.region != reg || r.lane != lane) continue;
          for (bool forward : {true, false}) {
            const double d = dist(pos, endpoint(r, !forward));
            if (d < best_d) {
              best_d = d;
              best_region = reg;
              best_from_last_lane = from_last;
              best_forward = forward;
            }
          }
        }
      }
    }
    done[static_cast<std::size_t>(best_region)] = true;

    std::vector<int> lanes_in_region;
    for (const auto& r : runs) {
      if (r.region == best_region) lanes_in_region.push_back(r.lane);
    }
    std::sort(lanes_in_region.begin(), lanes_in_region.end());
    lanes_in_region.erase(std::unique(lanes_in_region.begin(), lanes_in_region.end()), lanes_in_region.end());
    if (best_from_last_lane) std::reverse(lanes_in_region.begin(), lanes_in_region.end());

    bool forward = best_forward;
    for (int lane : lanes_in_region) {
      std::vector<const Run*> lane_runs;
      for (const auto& r : runs) {
        if (r.region == best_region && r.lane == lane) lane_runs.push_back(&r);
      }
      std::sort(lane_runs.begin(), lane_runs.end(), [&](const Run* x, const Run* y) {
        return forward ? x->lo < y->lo : x->lo > y->lo;
      });
      for (const Run* r : lane_runs) {
        CoveragePass pass;
        pass.start = endpoint(*r, !forward);
        pass.end = endpoint(*r, forward);
        pass.region = best_region;
        pass.lane = lane;
        plan.passes.push_back(pass);
        pos = pass.end;
      }
      forward = !forward;
    }
  }
  return plan;
}

}  // namespace reaper
