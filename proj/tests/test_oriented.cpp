#include <doctest.h>

#include <algorithm>
#include <set>

#include "stochlab/oriented.hpp"

using namespace stochlab;

namespace {

// Reach set as the least fixed point of one-step expansion, recomputed over
// the whole reached set until nothing changes.
std::set<Site> fixed_point_reach(const OrientedConfig& c) {
  const int L = c.radius();
  std::set<Site> reach{{0, 0}};
  for (bool grew = true; grew;) {
    grew = false;
    const std::set<Site> snapshot = reach;
    for (const Site s : snapshot) {
      if (sup_norm(s) == L) continue;
      for (const Heading h : kHeadings)
        if (c.traversable(s, h)) grew |= reach.insert(step(s, h)).second;
    }
  }
  return reach;
}

}  // namespace

TEST_CASE("orientation of an edge is seen consistently from both ends") {
  const OrientedConfig c(6, 0.5, 3, 1);
  for (int x = -5; x <= 5; ++x)
    for (int y = -5; y <= 5; ++y) {
      const Site s{x, y};
      CHECK(c.traversable(s, Heading::E) != c.traversable(step(s, Heading::E), Heading::W));
      CHECK(c.traversable(s, Heading::N) != c.traversable(step(s, Heading::N), Heading::S));
    }
}

TEST_CASE("extreme densities") {
  const OrientedConfig up(5, 1.0, 1, 1);
  const auto r = reachable_from_origin(up);
  CHECK(r.touched_boundary);
  for (const Site s : r.reached) CHECK((s.x >= 0 && s.y >= 0));
  CHECK(r.reached.size() == 35);  // the far corner is only adjacent to boundary sites
  CHECK(r.frontier_sizes.front() == 1);
  const OrientedConfig down(5, 0.0, 1, 1);
  CHECK(touches_boundary(down));
  CHECK_THROWS_AS(OrientedConfig(5, 1.2, 1, 1), InvalidParameter);
}

TEST_CASE("reach sets agree with the fixed-point oracle") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const double p = 0.2 + 0.01 * double(seed);
    const OrientedConfig c(8, p, seed, 2, seed % 3 == 0 ? 0.2 : 0.0);
    const auto r = reachable_from_origin(c);
    const auto oracle = fixed_point_reach(c);
    CHECK(std::vector<Site>(oracle.begin(), oracle.end()) == r.reached);
    CHECK(touches_boundary(c) == r.touched_boundary);
    std::size_t total = 0;
    for (auto n : r.frontier_sizes) total += n;
    CHECK(total == r.reached.size());
  }
}

TEST_CASE("enhancement only adds passages") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const OrientedConfig lo(10, 0.5, seed, 4, 0.1), hi(10, 0.5, seed, 4, 0.4);
    const auto a = reachable_from_origin(lo), b = reachable_from_origin(hi);
    const std::set<Site> big(b.reached.begin(), b.reached.end());
    for (const Site s : a.reached) CHECK(big.count(s) == 1);
    if (a.touched_boundary) CHECK(b.touched_boundary);
  }
}

TEST_CASE("hand-built overrides") {
  OrientedConfig c(2, 0.0, 0, 0);
  // Everything points left/down; open a staircase to the corner.
  c.set_forward({{0, 0}, false}, true);
  c.set_forward({{1, 0}, true}, true);
  const auto r = reachable_from_origin(c);
  CHECK(std::find(r.reached.begin(), r.reached.end(), Site{1, 1}) != r.reached.end());
  c.set_enhanced({{-1, 0}, false}, true);
  CHECK(c.traversable({-1, 0}, Heading::E));
}

TEST_CASE("estimates are reproducible across worker counts") {
  const RngStream base(5, 5);
  const auto a = estimate_theta_oriented(0.5, 20, 300, base, 1);
  const auto b = estimate_theta_oriented(0.5, 20, 300, base, 4);
  CHECK(a.successes == b.successes);
  const auto sym = symmetry_report(0.3, 20, 300, base);
  CHECK(sym.distance < 4.0);
}
