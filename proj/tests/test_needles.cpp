#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "stochlab/needles.hpp"

using namespace stochlab;

namespace {

constexpr double kPi = std::numbers::pi;

struct OracleHit {
  bool found = false;
  std::uint32_t needle = 0;
  long double t = 0;
};

// Scans every needle in long double.
OracleHit scan_all(const NeedleField& f, Point o, Point d, double max_range,
                   std::optional<std::uint32_t> exclude = std::nullopt) {
  OracleHit best;
  for (std::uint32_t i = 0; i < f.size(); ++i) {
    if (exclude && *exclude == i) continue;
    const Needle n = f.needle(i);
    const long double ax = n.endpoint_a().x, ay = n.endpoint_a().y;
    const long double ex = n.endpoint_b().x - ax, ey = n.endpoint_b().y - ay;
    const long double den = (long double)d.x * ey - (long double)d.y * ex;
    if (den == 0) continue;
    const long double wx = ax - o.x, wy = ay - o.y;
    const long double t = (wx * ey - wy * ex) / den;
    const long double s = (wx * d.y - wy * d.x) / den;
    if (t <= 0 || t > max_range || s < 0 || s > 1) continue;
    if (!best.found || t < best.t) best = {true, i, t};
  }
  return best;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double u = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
  return std::hypot(p.x - a.x - u * vx, p.y - a.y - u * vy);
}

Point unit(Point a, Point b) {
  const double l = std::hypot(b.x - a.x, b.y - a.y);
  return {(b.x - a.x) / l, (b.y - a.y) / l};
}

// All-pairs blocking oracle: own clipping, orientation-based intersection.
bool oracle_blocks(const NeedleField& f, double side) {
  const double h = side / 2;
  struct Seg {
    Point a, b;
  };
  std::vector<Seg> segs;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Needle n = f.needle(k);
    Point a = n.endpoint_a(), b = n.endpoint_b();
    double t0 = 0, t1 = 1;
    const double dx = b.x - a.x, dy = b.y - a.y;
    bool keep = true;
    for (const auto& [p, q] : {std::pair{-dx, a.x + h}, {dx, h - a.x}, {-dy, a.y + h}, {dy, h - a.y}}) {
      if (p == 0) {
        if (q < 0) keep = false;
        continue;
      }
      const double r = q / p;
      if (p < 0) t0 = std::max(t0, r);
      else t1 = std::min(t1, r);
    }
    if (!keep || t0 > t1) continue;
    segs.push_back({{a.x + t0 * dx, a.y + t0 * dy}, {a.x + t1 * dx, a.y + t1 * dy}});
  }
  auto orient = [](Point a, Point b, Point c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0) - (v < 0);
  };
  auto meet = [&](const Seg& s, const Seg& t) {
    return orient(s.a, s.b, t.a) * orient(s.a, s.b, t.b) <= 0 &&
           orient(t.a, t.b, s.a) * orient(t.a, t.b, s.b) <= 0;
  };
  const std::size_t n = segs.size();
  std::vector<std::size_t> parent(n + 2);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (std::max(segs[i].a.y, segs[i].b.y) >= h) parent[find(i)] = find(n);
    if (std::min(segs[i].a.y, segs[i].b.y) <= -h) parent[find(i)] = find(n + 1);
    for (std::size_t j = 0; j < i; ++j)
      if (meet(segs[i], segs[j])) parent[find(i)] = find(j);
  }
  return find(n) == find(n + 1);
}

}  // namespace

TEST_CASE("angle laws") {
  CHECK(AngleLaw::parse("uniform").describe() == AngleLaw::uniform().describe());
  CHECK(AngleLaw::parse("degenerate:0.5").is_degenerate());
  CHECK(AngleLaw::parse("degenerate:0.5").sample(0.3) == 0.5);
  const auto atoms = AngleLaw::parse("atoms:1/4,3/4:0.5,0.5");
  CHECK(atoms.sample(0.1) == doctest::Approx(kPi / 4));
  CHECK(atoms.sample(0.9) == doctest::Approx(3 * kPi / 4));
  const auto table = AngleLaw::parse("table:0,1:0.25,0.75");
  CHECK(table.sample(0.2) == 0.0);
  CHECK(table.sample(0.3) == 1.0);
  const auto u = AngleLaw::uniform();
  CHECK(u.sample(0.5) == doctest::Approx(kPi / 2));
  for (const char* bad : {"", "gaussian", "degenerate:4", "atoms:1/4:0.5", "table:0,1:0.5", "atoms:1/0:1",
                          "degenerate:x"})
    CHECK_THROWS_AS(AngleLaw::parse(bad), InvalidParameter);
}

TEST_CASE("fields are coupled across needle lengths") {
  const auto law = AngleLaw::uniform();
  const NeedleField a(5, 6, 0.5, law), b(5, 6, 2.0, law);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.needle(i).centre.x == b.needle(i).centre.x);
    CHECK(a.needle(i).centre.y == b.needle(i).centre.y);
    CHECK(a.needle(i).angle == b.needle(i).angle);
  }
  // Roughly one needle per unit cell.
  const NeedleField big(6, 30, 1.0, law);
  CHECK(std::abs(double(big.size()) - 3600.0) < 4 * 60.0);
  // Bucket ranges partition the needles.
  std::size_t total = 0;
  for (int i = 0; i < big.buckets_per_side(); ++i)
    for (int j = 0; j < big.buckets_per_side(); ++j) {
      const auto [lo, hi] = big.bucket_range(i, j);
      total += hi - lo;
    }
  CHECK(total == big.size());
}

TEST_CASE("first hit agrees with the all-needles scan") {
  RngStream r(77, 0);
  int hits = 0, degenerate = 0;
  for (int k = 0; k < 300; ++k) {
    const double eps = 0.3 + 2.5 * r.uniform01();
    const NeedleField f(r(), 12, eps, AngleLaw::uniform());
    const Point o{-8 + 16 * r.uniform01(), -8 + 16 * r.uniform01()};
    const double a = 2 * kPi * r.uniform01();
    const Point d{std::cos(a), std::sin(a)};
    const double range = 1 + 15 * r.uniform01();
    const auto got = first_hit(f, o, d, range);
    const auto want = scan_all(f, o, d, range);
    if (got.status == HitStatus::Degenerate) {
      ++degenerate;
      continue;
    }
    REQUIRE((got.status == HitStatus::Hit) == want.found);
    if (!want.found) continue;
    ++hits;
    CHECK(got.needle == want.needle);
    CHECK(std::abs(got.distance - double(want.t)) < 1e-9);
  }
  CHECK(hits > 100);
  CHECK(degenerate == 0);
  CHECK_THROWS_AS(first_hit(NeedleField(1, 4, 1, AngleLaw::uniform()), {0, 0}, {1, 1}, 2),
                  InvalidParameter);
}

TEST_CASE("reflections are specular and traces are additive") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const NeedleField f(seed, 12, 1.0, AngleLaw::uniform());
    const auto tr = trace_continuum(f, 0.3 + seed, 10.0, 500);
    double len = 0;
    for (std::size_t k = 1; k < tr.points.size(); ++k)
      len += std::hypot(tr.points[k].x - tr.points[k - 1].x, tr.points[k].y - tr.points[k - 1].y);
    CHECK(len == doctest::Approx(tr.total_length).epsilon(1e-12));
    for (std::size_t k = 0; k < tr.reflections(); ++k) {
      const Needle n = f.needle(tr.needles[k]);
      const Point p = tr.points[k + 1];
      CHECK(point_segment_distance(p, n.endpoint_a(), n.endpoint_b()) < 1e-9);
      const Point din = unit(tr.points[k], p);
      const Point dout = unit(p, tr.points[k + 2]);
      const double ux = std::cos(n.angle), uy = std::sin(n.angle);
      const double proj = din.x * ux + din.y * uy;
      CHECK(std::abs(dout.x - (2 * proj * ux - din.x)) < 1e-9);
      CHECK(std::abs(dout.y - (2 * proj * uy - din.y)) < 1e-9);
    }
    if (tr.outcome == ContinuumOutcome::EscapedRadius)
      CHECK(std::hypot(tr.points.back().x, tr.points.back().y) == doctest::Approx(10.0));
    const Point mid = tr.position_at(tr.total_length / 2);
    CHECK(std::isfinite(mid.x));
  }
}

TEST_CASE("reversed traces retrace the forward path") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const NeedleField f(seed + 100, 12, 1.0, AngleLaw::uniform());
    const auto fwd = trace_continuum(f, 1.0 + 0.1 * seed, 10.0, 500);
    if (fwd.outcome != ContinuumOutcome::EscapedRadius || fwd.reflections() == 0) continue;
    const std::size_t m = fwd.reflections();
    const Point end = fwd.points.back();
    const Point back = unit(end, fwd.points[m]);
    const auto rev = trace_from(f, end, back, 10.0, m);
    REQUIRE(rev.points.size() >= m + 1);
    for (std::size_t k = 1; k <= m; ++k) {
      CHECK(std::abs(rev.points[k].x - fwd.points[m + 1 - k].x) < 1e-9);
      CHECK(std::abs(rev.points[k].y - fwd.points[m + 1 - k].y) < 1e-9);
      CHECK(rev.needles[k - 1] == fwd.needles[m - k]);
    }
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("trace window requirement") {
  const NeedleField f(1, 5, 2.0, AngleLaw::uniform());
  CHECK_THROWS_AS(trace_continuum(f, 0.0, 4.5, 10), InvalidParameter);
  CHECK_NOTHROW(trace_continuum(f, 0.0, 4.0, 10));
}

TEST_CASE("vertical chains agree with the all-pairs oracle") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const double eps = 0.8 + 0.05 * double(seed % 20);
    const auto f = crossing_field(seed, 8.0, eps, AngleLaw::uniform());
    CHECK(blocks_vertical_chain(f, 8.0) == oracle_blocks(f, 8.0));
  }
}

TEST_CASE("vacant crossings are monotone in the needle length") {
  const double grid[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    bool prev = true;
    for (const double eps : grid) {
      const bool vacant = !blocks_vertical_chain(crossing_field(seed, 10.0, eps, AngleLaw::uniform()), 10.0);
      CHECK_FALSE((vacant && !prev));
      prev = vacant;
    }
  }
  const RngStream base(3, 3);
  const auto lo = vacant_crossing_probability(0.5, AngleLaw::uniform(), 10.0, 50, base);
  const auto hi = vacant_crossing_probability(4.0, AngleLaw::uniform(), 10.0, 50, base);
  CHECK(lo.successes >= hi.successes);
  CHECK(lo.successes == vacant_crossing_probability(0.5, AngleLaw::uniform(), 10.0, 50, base, 3).successes);
}

TEST_CASE("escape spectrum and diffusivity") {
  const NeedleField f(9, 22, 1.0, AngleLaw::uniform());
  std::vector<double> alphas;
  for (int k = 0; k < 16; ++k) alphas.push_back(2 * kPi * k / 16);
  const auto spec = escape_spectrum(f, alphas, 20.0, 100000);
  CHECK(spec.rows.size() == 16);
  CHECK(spec.escaped + spec.degenerate <= 16);

  std::vector<ContinuumTrace> traces;
  for (const double a : alphas) traces.push_back(trace_continuum(f, a, 20.0, 100000));
  const double ts[] = {1, 2, 4};
  const auto rep = estimate_diffusivity(traces, ts);
  CHECK(rep.rows.size() == 3);
  std::ostringstream out;
  write_trace_csv(traces, out);
  CHECK(out.str().find("trace") != std::string::npos);

  std::vector<ContinuumTrace> none(1);
  CHECK_THROWS_AS(estimate_diffusivity(none, ts), InvalidParameter);
}
