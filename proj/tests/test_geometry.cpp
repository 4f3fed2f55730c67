#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <queue>
#include <vector>

#include "qtask/geometry.hpp"
#include "qtask/rng.hpp"

using namespace qtask;

namespace {

// Independent oracle for 1+1 causal reachability: breadth-first search over
// an integer lattice with pitch 1/scale, moving one time step up with
// |dx| <= dt per move. Integer indexing keeps scene coordinates (multiples
// of 0.25) exactly on grid points; division by the scale is exact for them.
// Deliberately knows nothing about the sweep implementation.
bool lattice_reachable(const Point& src, const Point& dst, const std::vector<Region>& regions, double step) {
  if (!in_causal_future(src, dst)) return false;
  const long scale = std::lround(1.0 / step);  // grid pitch = 1/scale
  double xmin = std::min(src.x[0], dst.x[0]), xmax = std::max(src.x[0], dst.x[0]);
  for (const auto& r : regions)
    for (const auto& b : r.boxes) {
      xmin = std::min(xmin, b.x[0].lo);
      xmax = std::max(xmax, b.x[0].hi);
    }
  double pad = (dst.t - src.t) / 2 + step;
  long ixlo = (long)std::floor((xmin - pad) * scale);
  long ixhi = (long)std::ceil((xmax + pad) * scale);
  long it0 = std::lround(src.t * scale);
  long it1 = std::lround(dst.t * scale);
  long nt = it1 - it0, nx = ixhi - ixlo;
  auto pt = [&](long it, long ix) { return Point{(it0 + it) / (double)scale, {(ixlo + ix) / (double)scale}}; };
  auto clear = [&](const Point& a, const Point& b) {
    if (!in_causal_future(a, b)) return false;
    for (const auto& r : regions)
      if (r.impenetrable() && segment_meets_region_interior(a, b, r)) return false;
    return true;
  };
  if (clear(src, dst)) return true;
  std::vector<char> seen((nt + 1) * (nx + 1), 0);
  std::queue<std::pair<long, long>> q;
  for (long ix = 0; ix <= nx; ++ix)
    if (clear(src, pt(1, ix))) {
      seen[(nx + 1) + ix] = 1;
      q.push({1, ix});
    }
  while (!q.empty()) {
    auto [it, ix] = q.front();
    q.pop();
    Point p = pt(it, ix);
    if (clear(p, dst)) return true;
    if (it == nt) continue;
    for (long dxc = -1; dxc <= 1; ++dxc) {
      long jx = ix + dxc;
      if (jx < 0 || jx > nx) continue;
      if (seen[(it + 1) * (nx + 1) + jx]) continue;
      if (!clear(p, pt(it + 1, jx))) continue;
      seen[(it + 1) * (nx + 1) + jx] = 1;
      q.push({it + 1, jx});
    }
  }
  return false;
}

Point p1(double t, double x) { return Point{t, {x}}; }
Point p3(double t, double x, double y, double z) { return Point{t, {x, y, z}}; }

}  // namespace

TEST_CASE("interval arithmetic") {
  CHECK(interval(p3(0, 0, 0, 0), p3(6, 3, 4, 0)) == Catch::Approx(11.0));
  CHECK(interval(p3(1, 2, -1, 3), p3(1, 2, -1, 3)) == 0.0);
  CHECK(interval(p3(0, 0, 0, 0), p3(2, 3, 0, 0)) == Catch::Approx(-5.0));
  CHECK(interval(p1(0, 0), p1(3, 1)) == interval(p1(3, 1), p1(0, 0)));
  CHECK_THROWS_AS(interval(p1(0, 0), p3(1, 0, 0, 0)), std::invalid_argument);
}

TEST_CASE("causal classification of the computational-example coordinates") {
  // P1 = origin, P2 = (2; 3,0,0), Q0 = (6; 3,4,0), Q1 = (6; 3,-4,0)
  auto P1 = p3(0, 0, 0, 0), P2 = p3(2, 3, 0, 0), Q0 = p3(6, 3, 4, 0);
  CHECK(causal_relation(P1, P2).kind == Separation::Spacelike);
  CHECK(causal_relation(P1, P2).direction == TimeOrder::None);
  auto r = causal_relation(P2, Q0);
  CHECK(r.kind == Separation::Lightlike);
  CHECK(r.direction == TimeOrder::Future);
  auto self = causal_relation(P1, P1);
  CHECK(self.kind == Separation::Lightlike);
  CHECK(self.direction == TimeOrder::Future);

  CHECK(in_causal_future(P1, Q0));
  CHECK_FALSE(in_causal_future(P1, P2));
  CHECK(in_causal_future(P1, P1));
}

TEST_CASE("causal relation antisymmetry and transitivity on random points") {
  Rng rng(2026);
  for (int i = 0; i < 500; ++i) {
    int d = (i % 2 == 0) ? 1 : 3;
    auto rand_pt = [&] {
      Point p;
      p.t = rng.uniform(-10, 10);
      for (int k = 0; k < d; ++k) p.x.push_back(rng.uniform(-10, 10));
      return p;
    };
    Point a = rand_pt(), b = rand_pt(), c = rand_pt();
    auto ab = causal_relation(a, b), ba = causal_relation(b, a);
    CHECK(ab.kind == ba.kind);
    if (ab.kind != Separation::Spacelike && !(a.t == b.t && a.x == b.x)) {
      CHECK(((ab.direction == TimeOrder::Future && ba.direction == TimeOrder::Past) ||
             (ab.direction == TimeOrder::Past && ba.direction == TimeOrder::Future)));
    }
    if (in_causal_future(a, b) && in_causal_future(b, c)) CHECK(in_causal_future(a, c));
  }
}

TEST_CASE("boost invariance of causal kind in 1+1") {
  Rng rng(7);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    Point a = p1(rng.uniform(-5, 5), rng.uniform(-5, 5));
    Point b = p1(rng.uniform(-5, 5), rng.uniform(-5, 5));
    double s = interval(a, b);
    // guard band around the light cone: skip nearly lightlike pairs
    if (std::abs(s) < 1e-9) continue;
    double v = rng.uniform(-0.95, 0.95);
    auto kind = causal_relation(a, b).kind;
    auto boosted_kind = causal_relation(boosted(a, v), boosted(b, v)).kind;
    CHECK(kind == boosted_kind);
    ++checked;
  }
  CHECK(checked > 1500);
}

TEST_CASE("path feasibility: frozen examples") {
  std::vector<Region> none;
  CHECK(causal_path_exists(p1(0, 0), p1(2, 0), none));

  // A box wide enough to sever every causal route in 1+1.
  auto blocker = make_impenetrable("blocker", {make_box({0.5, 1.5}, {{-1.0, 1.0}})});
  CHECK_FALSE(causal_path_exists(p1(0, 0), p1(2, 0), {blocker}));
  // oracle agrees
  CHECK_FALSE(lattice_reachable(p1(0, 0), p1(2, 0), {blocker}, 0.05));

  // A narrower box with room to route around.
  auto post = make_impenetrable("post", {make_box({1.0, 2.0}, {{-0.5, 0.5}})});
  auto res = find_causal_path(p1(0, 0), p1(4, 0), {post});
  REQUIRE(res.reachable());
  CHECK(lattice_reachable(p1(0, 0), p1(4, 0), {post}, 0.05));
  // certificate re-validates segment by segment
  for (std::size_t i = 0; i + 1 < res.waypoints.size(); ++i)
    CHECK(segment_is_clear(res.waypoints[i], res.waypoints[i + 1], {post}));

  // penetrable regions never block
  auto budget = make_budgeted("noise", {make_box({0.5, 1.5}, {{-1.0, 1.0}})}, 1, 0);
  CHECK(causal_path_exists(p1(0, 0), p1(2, 0), {budget}));

  CHECK_THROWS_AS(find_causal_path(p3(0, 0, 0, 0), p3(1, 0, 0, 0), none, PathOptions{0}), std::invalid_argument);
}

TEST_CASE("no-region path feasibility reduces to the cone test") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    Point a = p1(rng.uniform(-5, 5), rng.uniform(-5, 5));
    Point b = p1(rng.uniform(-5, 5), rng.uniform(-5, 5));
    CHECK(causal_path_exists(a, b, {}) == in_causal_future(a, b));
  }
  for (int i = 0; i < 300; ++i) {
    Point a = p3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    Point b = p3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    CHECK(causal_path_exists(a, b, {}) == in_causal_future(a, b));
  }
}

TEST_CASE("waypoint graph agrees with brute-force lattice on random 1+1 scenes") {
  Rng rng(404);
  int done = 0;
  auto snap = [&](double lo, double hi) { return std::round(rng.uniform(lo, hi) * 4.0) / 4.0; };
  while (done < 220) {
    Point src = p1(0.0, snap(-2, 2));
    Point dst = p1(snap(2, 5), snap(-3, 3));
    if (!in_causal_future(src, dst)) continue;
    int nboxes = 1 + (int)rng.below(2);
    std::vector<Region> regions;
    bool degenerate = false;
    for (int b = 0; b < nboxes; ++b) {
      double t0 = snap(0.25, dst.t - 0.5), t1 = t0 + std::max(0.25, snap(0.25, 1.5));
      double x0 = snap(-3, 2.5), x1 = x0 + std::max(0.25, snap(0.25, 2.0));
      Box box = make_box({t0, t1}, {{x0, x1}});
      if (box.contains_open(src) || box.contains_open(dst)) degenerate = true;
      regions.push_back(make_impenetrable("r" + std::to_string(b), {box}));
    }
    if (degenerate) continue;
    bool got = causal_path_exists(src, dst, regions);
    bool want = lattice_reachable(src, dst, regions, 0.05);
    INFO("src=(" << src.t << ";" << src.x[0] << ") dst=(" << dst.t << ";" << dst.x[0] << ")");
    REQUIRE(got == want);
    ++done;
  }
}

TEST_CASE("adding regions is monotone for path feasibility") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    Point src = p1(0, rng.uniform(-2, 2));
    Point dst = p1(rng.uniform(1, 5), rng.uniform(-3, 3));
    double t0 = rng.uniform(0.2, 3.5), x0 = rng.uniform(-3, 2);
    std::vector<Region> one{make_impenetrable("a", {make_box({t0, t0 + 1}, {{x0, x0 + 1}})})};
    auto two = one;
    double t2 = rng.uniform(0.2, 3.5), x2 = rng.uniform(-3, 2);
    two.push_back(make_impenetrable("b", {make_box({t2, t2 + 0.8}, {{x2, x2 + 0.8}})}));
    bool before = causal_path_exists(src, dst, one);
    bool after = causal_path_exists(src, dst, two);
    if (!before) CHECK_FALSE(after);
  }
}

TEST_CASE("3+1 lattice routing finds certified detours") {
  // block the direct line from the origin to (4; 0,0,0) with a slab around it
  auto slab = make_impenetrable("slab", {Box{{1.0, 2.0}, {{-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}}}});
  auto res = find_causal_path(p3(0, 0, 0, 0), p3(4, 0, 0, 0), {slab}, PathOptions{12});
  REQUIRE(res.status == PathStatus::Reachable);
  for (std::size_t i = 0; i + 1 < res.waypoints.size(); ++i)
    CHECK(segment_is_clear(res.waypoints[i], res.waypoints[i + 1], {slab}));

  // a sealed-off destination: unresolved at low resolution rather than a false positive
  auto wall = make_impenetrable("wall", {Box{{0.5, 3.5}, {{-4.0, 4.0}, {-4.0, 4.0}, {-4.0, 4.0}}}});
  auto blocked = find_causal_path(p3(0, 0, 0, 0), p3(4, 0, 0, 0), {wall}, PathOptions{8});
  CHECK(blocked.status == PathStatus::Unresolved);
  CHECK(blocked.resolution == 8);
}

TEST_CASE("region well-formedness") {
  CHECK(make_impenetrable("r", {make_box({0, 1}, {{0, 1}})}).well_formed());
  CHECK_FALSE(make_box({1, 1}, {{0, 1}}).well_formed());
  Region bad = make_impenetrable("r", {make_box({0, 1}, {{0, 1}})});
  bad.bit_budget = 3;  // impenetrable regions must have zero budgets
  CHECK_FALSE(bad.well_formed());
}
