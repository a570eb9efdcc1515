#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "stochlab/epidemic.hpp"

using namespace stochlab;

namespace {

Population hand_population(std::vector<std::pair<double, double>> points, double mark = 1.0) {
  Population pop;
  pop.dimension = 2;
  for (std::size_t i = 0; i < points.size(); ++i) {
    pop.x.push_back(points[i].first);
    pop.y.push_back(points[i].second);
    pop.state.push_back(i == 0 ? Compartment::I : Compartment::S);
    pop.mark.push_back(mark);
    pop.id.push_back(i);
    pop.infected_step.push_back(i == 0 ? 0 : -1);
  }
  return pop;
}

// Infected set after a cascade at frozen positions, by repeated O(n^2) sweeps.
std::vector<Compartment> brute_cascade(const Population& pop) {
  auto state = pop.state;
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (state[i] != Compartment::I) continue;
      for (std::size_t j = 0; j < pop.size(); ++j) {
        if (state[j] != Compartment::S) continue;
        const double dx = pop.x[i] - pop.x[j], dy = pop.y[i] - pop.y[j];
        if (dx * dx + dy * dy <= 1.0) {
          state[j] = Compartment::I;
          grew = true;
        }
      }
    }
  }
  return state;
}

}  // namespace

TEST_CASE("configuration validation") {
  EpidemicConfig c;
  CHECK_NOTHROW(c.validate());
  c.alpha = 0;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = {};
  c.dimension = 3;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = {};
  c.box_radius = 2;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  CHECK(epidemic_model_from_string("delayed") == EpidemicModel::Delayed);
  CHECK_THROWS_AS(epidemic_model_from_string("sir"), InvalidParameter);
}

TEST_CASE("a lone infected particle dies out") {
  EpidemicConfig c;
  c.alpha = 1.0;
  const auto out = run(c, RngStream(1, 1), hand_population({{0, 0}}, 0.5));
  CHECK(out.kind == OutcomeKind::Extinct);
  CHECK(out.total_infected == 1);
  // Removed once infected for longer than mark / alpha = 0.5.
  CHECK(out.time == doctest::Approx(0.51).epsilon(1e-9));
}

TEST_CASE("infection reaches exactly distance one through chains") {
  EpidemicConfig c;
  c.model = EpidemicModel::Delayed;
  c.alpha = 1e6;  // removed after a single step
  const auto out = run(c, RngStream(1, 1),
                       hand_population({{0, 0}, {0.9, 0}, {1.8, 0}, {3.5, 0}, {0, -1.0}}));
  CHECK(out.total_infected == 4);
  CHECK(out.infected_step[3] == -1);
  CHECK(out.infected_step[1] == 0);
  CHECK(out.infected_step[2] == 0);
  CHECK(out.infected_step[4] == 0);
}

TEST_CASE("cell-list cascade agrees with brute force at every step") {
  for (const auto model : {EpidemicModel::Diffusion, EpidemicModel::Delayed}) {
    EpidemicConfig c;
    c.model = model;
    c.box_radius = 8;
    c.alpha = 2.0;
    c.dt = 0.05;
    EpidemicSimulation sim(c, RngStream(17, static_cast<std::uint64_t>(model)));
    for (int t = 0; t < 200; ++t) {
      const auto expect = brute_cascade(sim.population());
      sim.cascade();
      REQUIRE(sim.population().state == expect);
      if (!sim.advance()) break;
    }
  }
}

TEST_CASE("compartment invariants") {
  EpidemicConfig c;
  c.box_radius = 10;
  c.alpha = 1.0;
  c.record_events = true;
  std::size_t n = 0, last_s = 0, last_r = 0;
  bool first = true, ok = true;
  const auto out = run(c, RngStream(3, 3), [&](const EpidemicSimulation& sim) {
    const auto& p = sim.population();
    const std::size_t s = p.count(Compartment::S), i = p.count(Compartment::I), r = p.count(Compartment::R);
    if (first) {
      n = p.size();
      last_s = s;
      first = false;
    }
    ok = ok && s + i + r == n && s <= last_s && r >= last_r && i == sim.infected_now() &&
         sim.total_infected() == i + r;
    last_s = s;
    last_r = r;
  });
  CHECK(ok);
  std::size_t infections = 0;
  for (const auto& e : out.events) infections += e.type == EventType::Infection;
  CHECK(infections == out.total_infected);
  std::ostringstream csv;
  write_event_csv(out.events, csv);
  CHECK(csv.str().rfind("time,event,particle,x,y\n", 0) == 0);
}

TEST_CASE("delayed model leaves susceptibles in place") {
  EpidemicConfig c;
  c.model = EpidemicModel::Delayed;
  c.box_radius = 10;
  EpidemicSimulation sim(c, RngStream(9, 9));
  const auto before = sim.population();
  for (int t = 0; t < 50 && sim.step(); ++t) {
  }
  const auto& after = sim.population();
  for (std::size_t i = 0; i < after.size(); ++i)
    if (after.state[i] == Compartment::S) {
      CHECK(after.x[i] == before.x[i]);
      CHECK(after.y[i] == before.y[i]);
    }
}

TEST_CASE("one-dimensional runs") {
  EpidemicConfig c;
  c.dimension = 1;
  c.alpha = 0.5;
  const auto out = run(c, RngStream(2, 2));
  CHECK(out.total_infected >= 1);
  CHECK(out.kind != OutcomeKind::StepLimit);
}

TEST_CASE("coupled delayed runs are monotone in alpha") {
  EpidemicConfig c;
  c.model = EpidemicModel::Delayed;
  c.box_radius = 12;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    CHECK_NOTHROW(coupled_delayed_run(c, {0.5, 1.0, 5.0}, RngStream(seed, 1)));
  c.model = EpidemicModel::Diffusion;
  CHECK_THROWS_AS(coupled_delayed_run(c, {0.5, 5.0}, RngStream(1, 1)), InvalidParameter);

  EpidemicConfig d;
  d.model = EpidemicModel::Delayed;
  d.box_radius = 10;
  const auto curve = scan_alpha(d, {0.5, 2.0, 8.0}, 40, RngStream(4, 4), true);
  CHECK(curve.estimate[0].successes >= curve.estimate[1].successes);
  CHECK(curve.estimate[1].successes >= curve.estimate[2].successes);
}

TEST_CASE("survival estimates are reproducible across worker counts") {
  EpidemicConfig c;
  c.box_radius = 8;
  c.alpha = 2.0;
  const auto a = estimate_survival(c, 30, RngStream(6, 6), 1);
  const auto b = estimate_survival(c, 30, RngStream(6, 6), 3);
  CHECK(a.successes == b.successes);
}
