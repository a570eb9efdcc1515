#include <doctest.h>

#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "stochlab/mirrors_lattice.hpp"

using namespace stochlab;

namespace {

struct EagerResult {
  TraceKind kind;
  std::uint64_t steps;
};

// Materializes the whole box and follows the ray with an explicit table of
// visited states. A repeated state of any kind ends the trace as a loop.
template <class StateFn>
EagerResult eager_trace(StateFn state, RayState start, int radius) {
  const int side = 2 * radius + 1;
  std::vector<MirrorState> grid(static_cast<std::size_t>(side) * side);
  for (int x = -radius; x <= radius; ++x)
    for (int y = -radius; y <= radius; ++y)
      grid[static_cast<std::size_t>(x + radius) * side + (y + radius)] = state(Site{x, y});
  std::set<std::tuple<int, int, int>> visited{{start.site.x, start.site.y, int(start.heading)}};
  Site s = start.site;
  Heading h = start.heading;
  for (std::uint64_t t = 1;; ++t) {
    s = step(s, h);
    if (std::abs(s.x) > radius || std::abs(s.y) > radius) return {TraceKind::Escaped, t};
    h = apply_mirror(grid[static_cast<std::size_t>(s.x + radius) * side + (s.y + radius)], h);
    if (!visited.insert({s.x, s.y, int(h)}).second) return {TraceKind::Looped, t};
  }
}

}  // namespace

TEST_CASE("mirror reflection tables") {
  using enum Heading;
  CHECK(reflect(MirrorOrientation::NE, N) == E);
  CHECK(reflect(MirrorOrientation::NE, E) == N);
  CHECK(reflect(MirrorOrientation::NE, S) == W);
  CHECK(reflect(MirrorOrientation::NW, N) == W);
  CHECK(reflect(MirrorOrientation::NW, E) == S);
  for (const Heading h : kHeadings)
    for (const auto m : {MirrorOrientation::NE, MirrorOrientation::NW}) {
      CHECK(reflect(m, reflect(m, h)) == h);
      // Time reversal: a mirror maps reverse(out) back to reverse(in).
      CHECK(reflect(m, reverse(reflect(m, h))) == reverse(h));
    }
}

TEST_CASE("single mirror") {
  const auto f = MirrorField::explicit_field(5, {{{0, 3}, MirrorState::NE}});
  const auto out = trace_ray(f, {{0, 0}, Heading::N}, 5, state_budget(5));
  CHECK(out.kind == TraceKind::Escaped);
  CHECK(out.steps == 9);  // 3 up, then 6 east to x = 6
  const auto path = trace_path(f, {{0, 0}, Heading::N}, 5, 100);
  CHECK(path.size() == 10);
  CHECK(path[3] == RayState{{0, 3}, Heading::E});
}

TEST_CASE("explicit four-mirror loop through the origin") {
  const auto f = MirrorField::explicit_field(4, {{{0, 1}, MirrorState::NE},
                                                 {{1, 1}, MirrorState::NW},
                                                 {{1, 0}, MirrorState::NE},
                                                 {{0, 0}, MirrorState::NW}});
  const auto out = trace_ray(f, {{0, 0}, Heading::N}, 4, state_budget(4));
  CHECK(out.kind == TraceKind::Looped);
  CHECK(out.period == 4);
  // Without the origin mirror the ray leaves westwards.
  const auto g = MirrorField::explicit_field(4, {{{0, 1}, MirrorState::NE},
                                                 {{1, 1}, MirrorState::NW},
                                                 {{1, 0}, MirrorState::NE}});
  CHECK(trace_ray(g, {{0, 0}, Heading::N}, 4, state_budget(4)).kind == TraceKind::Escaped);
}

TEST_CASE("lazy tracer agrees with the eager oracle") {
  {
    const MirrorField f(1.0, 50, 42, 0);
    const auto a = trace_ray(f, {{0, 0}, Heading::N}, 50, state_budget(50));
    const auto b = eager_trace([&](Site s) { return f.state(s); }, {{0, 0}, Heading::N}, 50);
    CHECK(a.kind == b.kind);
    CHECK(a.steps == b.steps);
  }
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const double p = seed % 2 ? 1.0 : 0.6;
    const MirrorField f(p, 15, seed, 3);
    const auto a = trace_ray(f, {{0, 0}, Heading::N}, 15, state_budget(15));
    const auto b = eager_trace([&](Site s) { return f.state(s); }, {{0, 0}, Heading::N}, 15);
    REQUIRE(a.kind == b.kind);
    CHECK(a.steps == b.steps);
  }
}

TEST_CASE("reversed escaping path retraces the forward path") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const MirrorField f(0.8, 12, seed, 9);
    const auto path = trace_path(f, {{0, 0}, Heading::N}, 12, state_budget(12));
    if (in_box(path.back().site, 12)) continue;  // looped
    const std::size_t last = path.size() - 2;  // last state inside the box
    if (last == 0) continue;
    const RayState back{path[last].site, reverse(path[last - 1].heading)};
    const auto rev = trace_path(f, back, 12, last);
    REQUIRE(rev.size() == last + 1);
    for (std::size_t k = 0; k <= last; ++k) CHECK(rev[k].site == path[last - k].site);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("a loop returns to its initial state") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MirrorField f(1.0, 10, seed, 1);
    const auto out = trace_ray(f, {{0, 0}, Heading::N}, 10, state_budget(10));
    if (out.kind != TraceKind::Looped) continue;
    const auto path = trace_path(f, {{0, 0}, Heading::N}, 10, out.period);
    CHECK(path.back() == path.front());
  }
}

TEST_CASE("circuits block escape") {
  int blocked = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const MirrorField f(1.0, 20, seed, 5);
    if (!blocked_by_circuit(f, 20)) continue;
    ++blocked;
    CHECK(trace_ray(f, {{0, 0}, Heading::N}, 20, state_budget(20)).kind != TraceKind::Escaped);
  }
  CHECK(blocked > 0);

  // A full class-0 field blocks; an empty field does not.
  std::map<Site, MirrorState> all;
  for (int x = -4; x <= 4; ++x)
    for (int y = -4; y <= 4; ++y)
      all[{x, y}] = class_orientation({x, y}, 0) == MirrorOrientation::NE ? MirrorState::NE
                                                                          : MirrorState::NW;
  const auto full = MirrorField::explicit_field(4, all);
  CHECK(blocked_by_circuit(full, 4, 0));
  CHECK(blocked_by_circuit(full, 4));
  CHECK_FALSE(blocked_by_circuit(full, 4, 1));
  CHECK_FALSE(blocked_by_circuit(MirrorField::explicit_field(4, {}), 4));
  CHECK_THROWS_AS(blocked_by_circuit(full, 4, 2), InvalidParameter);
}

TEST_CASE("Manhattan mirrors turn one street into the other") {
  for (const bool fr : {false, true})
    for (const bool fc : {false, true}) {
      const ManhattanField f(1.0, 6, 1, 1, fr, fc);
      for (int x = -6; x <= 6; ++x)
        for (int y = -6; y <= 6; ++y) {
          const Site s{x, y};
          const auto m = f.state(s);
          REQUIRE(m != MirrorState::Empty);
          CHECK(apply_mirror(m, f.column_heading(x)) == f.row_heading(y));
          CHECK(apply_mirror(m, f.row_heading(y)) == f.column_heading(x));
        }
    }
}

TEST_CASE("Manhattan tracing") {
  const ManhattanField empty(0.0, 10, 1, 1);
  const auto straight = trace_manhattan(empty, {{0, 0}, Heading::N}, 10, state_budget(10));
  CHECK(straight.kind == TraceKind::Escaped);
  CHECK(straight.steps == 11);
  CHECK_THROWS_AS(trace_manhattan(empty, {{0, 0}, Heading::S}, 10, 100), InvalidParameter);
  CHECK_THROWS_AS(trace_manhattan(empty, {{1, 0}, Heading::N}, 10, 100), InvalidParameter);

  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const ManhattanField f(0.3, 15, seed, 2);
    const RayState start{{0, 0}, f.column_heading(0)};
    const auto a = trace_manhattan(f, start, 15, state_budget(15));
    const auto b = eager_trace([&](Site s) { return f.state(s); }, start, 15);
    REQUIRE(a.kind == b.kind);
    CHECK(a.steps == b.steps);
    // Every state along the path follows the street pattern.
    for (const auto& st : trace_manhattan_path(f, start, 15, 200))
      if (in_box(st.site, 15)) CHECK(f.admissible(st));
  }
}

TEST_CASE("estimates do not depend on the worker count") {
  const RngStream base(8, 8);
  const auto a = estimate_theta_ehrenfest(1.0, 20, 200, base, 1);
  const auto b = estimate_theta_ehrenfest(1.0, 20, 200, base, 4);
  CHECK(a.successes == b.successes);
  const auto c = estimate_theta_manhattan(0.3, 20, 200, base, 1);
  const auto d = estimate_theta_manhattan(0.3, 20, 200, base, 3);
  CHECK(c.successes == d.successes);
}

TEST_CASE("path dump") {
  const auto f = MirrorField::explicit_field(3, {});
  const auto path = trace_path(f, {{0, 0}, Heading::E}, 3, 10);
  std::ostringstream out;
  dump_path(path, out);
  CHECK(out.str().rfind("step x y heading\n0 0 0 E\n", 0) == 0);
  CHECK(path.size() == 5);
}
