#include <doctest.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "stochlab/exact.hpp"

using namespace stochlab;

namespace {

std::vector<int> dsu(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

int find(std::vector<int>& p, int a) {
  while (p[a] != a) a = p[a] = p[p[a]];
  return a;
}

// Sum over all 2^m edge subsets of the bunkbed with a fresh union-find each.
BunkbedProbabilities brute_bunkbed(const SimpleGraph& g, int u, int v, const ExactProb& p) {
  const int n = g.vertices();
  std::vector<std::pair<int, int>> edges = g.edges();
  for (const auto& [a, b] : g.edges()) edges.emplace_back(a + n, b + n);
  for (int w = 0; w < n; ++w) edges.emplace_back(w, w + n);
  const std::size_t m = edges.size();
  BunkbedProbabilities out{0, 0};
  for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
    auto parent = dsu(2 * n);
    ExactProb weight = 1;
    for (std::size_t e = 0; e < m; ++e) {
      if (mask >> e & 1) {
        weight *= p;
        parent[find(parent, edges[e].first)] = find(parent, edges[e].second);
      } else {
        weight *= 1 - p;
      }
    }
    if (find(parent, u) == find(parent, v)) out.p11 += weight;
    if (find(parent, u) == find(parent, v + n)) out.p12 += weight;
  }
  return out;
}

struct BruteStats {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> single;
  std::vector<std::vector<std::uint64_t>> pair;
};

// Subset scan with an acyclicity or connectivity test per subset.
BruteStats brute_subgraphs(const SimpleGraph& g, SubgraphClass kind) {
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  BruteStats s;
  s.single.assign(m, 0);
  s.pair.assign(m, std::vector<std::uint64_t>(m, 0));
  for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
    auto parent = dsu(g.vertices());
    bool acyclic = true;
    int components = g.vertices();
    for (std::size_t e = 0; e < m; ++e) {
      if (!(mask >> e & 1)) continue;
      const int a = find(parent, edges[e].first), b = find(parent, edges[e].second);
      if (a == b) acyclic = false;
      else {
        parent[a] = b;
        --components;
      }
    }
    const bool member = kind == SubgraphClass::Forest      ? acyclic
                        : kind == SubgraphClass::Connected ? components == 1
                                                           : acyclic && components == 1;
    if (!member) continue;
    ++s.total;
    for (std::size_t e = 0; e < m; ++e) {
      if (!(mask >> e & 1)) continue;
      ++s.single[e];
      for (std::size_t f = e + 1; f < m; ++f) s.pair[e][f] += mask >> f & 1;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("rationals") {
  CHECK(parse_rational("3/10") == ExactProb(3, 10));
  CHECK(parse_rational("0.3") == ExactProb(3, 10));
  CHECK(parse_rational("1") == 1);
  CHECK(parse_rational("6/8") == ExactProb(3, 4));
  CHECK(to_string(ExactProb(3, 4)) == "3/4");
  for (const char* bad : {"", "a/b", "1/0", "0.3x", "/3"}) CHECK_THROWS_AS(parse_rational(bad), InvalidParameter);
}

TEST_CASE("simple graphs and graph6") {
  CHECK_THROWS_AS(SimpleGraph(3, {{0, 0}}), InvalidParameter);
  CHECK_THROWS_AS(SimpleGraph(3, {{0, 3}}), InvalidParameter);
  CHECK_THROWS_AS(SimpleGraph(3, {{0, 1}, {1, 0}}), InvalidParameter);
  const auto pet = SimpleGraph::petersen();
  CHECK(pet.vertices() == 10);
  CHECK(pet.edge_count() == 15);
  CHECK(pet.connected());
  CHECK_FALSE(SimpleGraph(3, {{0, 1}}).connected());
  for (const auto& g : {SimpleGraph::complete(5), SimpleGraph::path(4), SimpleGraph::cycle(6), pet})
    CHECK(parse_graph6(to_graph6(g)) == g);
  CHECK(to_graph6(SimpleGraph::complete(2)) == "A_");
  CHECK(to_graph6(SimpleGraph::complete(3)) == "Bw");
  CHECK_THROWS_AS(parse_graph6("A"), InvalidParameter);
  CHECK_THROWS_AS(parse_graph6("A~"), InvalidParameter);
}

TEST_CASE("graph6 corpus ingest") {
  const std::string path = std::string(STOCHLAB_TEST_DATA_DIR) + "/connected_upto5.g6";
  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) lines += !l.empty();
  const auto graphs = read_graph6_file(path);
  CHECK(graphs.size() == lines);
  std::vector<std::size_t> by_n(6, 0);
  for (const auto& g : graphs) {
    CHECK(g.connected());
    ++by_n[static_cast<std::size_t>(g.vertices())];
  }
  // Independent corpus counts agree with our enumeration.
  for (int n = 1; n <= 5; ++n) CHECK(by_n[n] == connected_graphs(n).size());

  const std::string bad = "/tmp/stochlab_bad.g6";
  std::ofstream(bad) << "A_\nBw\n!!\n";
  try {
    read_graph6_file(bad);
    FAIL("expected a parse error");
  } catch (const InvalidParameter& e) {
    CHECK(std::string(e.what()).find(":3: ") != std::string::npos);
  }
}

TEST_CASE("connected graph counts") {
  const std::size_t known[] = {0, 1, 1, 2, 6, 21, 112};
  for (int n = 1; n <= 6; ++n) CHECK(connected_graphs(n).size() == known[n]);
  CHECK(connected_graphs_upto(4).size() == 10);
  CHECK_THROWS_AS(connected_graphs(7), InvalidParameter);
}

TEST_CASE("bunkbed on K2 by hand") {
  // The bunkbed of K2 is a 4-cycle u - v - v' - u' - u.
  const auto g = SimpleGraph::complete(2);
  for (const auto& p : {ExactProb(1, 2), ExactProb(3, 10)}) {
    const auto r = bunkbed_probabilities(g, 0, 1, p);
    CHECK(r.p11 == p + (1 - p) * p * p * p);
    CHECK(r.p12 == 2 * p * p - p * p * p * p);
  }
  const auto half = bunkbed_probabilities(g, 0, 1, ExactProb(1, 2));
  CHECK(half.gap() == ExactProb(1, 8));
  const auto bb = build_bunkbed(SimpleGraph::path(3));
  CHECK(bb.vertices() == 6);
  CHECK(bb.edges.size() == 7);
}

TEST_CASE("bunkbed probabilities agree with brute force") {
  const ExactProb p(3, 10);
  for (const auto& g : connected_graphs_upto(4)) {
    for (int u = 0; u < g.vertices(); ++u)
      for (int v = 0; v < g.vertices(); ++v) {
        if (u == v) continue;
        const auto fast = bunkbed_probabilities(g, u, v, p);
        const auto slow = brute_bunkbed(g, u, v, p);
        CHECK(fast.p11 == slow.p11);
        CHECK(fast.p12 == slow.p12);
      }
  }
}

TEST_CASE("bunkbed sweep and conditional variants") {
  std::vector<ExactProb> grid;
  for (int k = 1; k <= 9; ++k) grid.emplace_back(k, 10);
  for (const auto& g : connected_graphs_upto(4)) {
    const auto r = bunkbed_check(g, grid);
    CHECK_FALSE(r.violated());
    CHECK(r.checked == grid.size() * static_cast<std::size_t>(g.vertices() * (g.vertices() - 1)));
  }
  const auto k2 = SimpleGraph::complete(2);
  // Every vertical edge open: the sheets are glued, so the gap is zero.
  const auto all = bunkbed_check_conditional(k2, {0, 1}, grid);
  CHECK(all.min_gap == 0);
  // No vertical edge open: the other sheet is unreachable.
  const auto none = bunkbed_check_conditional(k2, {}, grid);
  CHECK(none.p12 == 0);
  CHECK(none.min_gap == ExactProb(1, 10));
  CHECK_THROWS_AS(bunkbed_check_conditional(k2, {2}, grid), InvalidParameter);
  CHECK_THROWS_AS(bunkbed_check(SimpleGraph::complete(6), grid, 20), ResourceLimit);
}

TEST_CASE("bunkbed Monte Carlo agrees with the exact value") {
  const auto g = SimpleGraph::cycle(4);
  const auto exact = bunkbed_probabilities(g, 0, 2, ExactProb(1, 2));
  const auto mc = bunkbed_monte_carlo(g, 0, 2, 0.5, 20000, RngStream(4, 4));
  CHECK(std::abs(mc.same.point - exact.p11.convert_to<double>()) < 4 * mc.same.standard_error());
  CHECK(std::abs(mc.gap_mean - exact.gap().convert_to<double>()) < 4 * mc.gap_se);
}

TEST_CASE("forests, connected subgraphs and trees of K3") {
  const auto k3 = SimpleGraph::complete(3);
  const auto usf = usf_check(k3);
  CHECK(enumerate_forests(k3).count() == 7);
  CHECK(usf.p_e == ExactProb(3, 7));
  CHECK(usf.p_ef == ExactProb(1, 7));
  CHECK(usf.max_excess == ExactProb(1, 7) - ExactProb(9, 49));
  const auto ucs = ucs_check(k3);
  CHECK(ucs.p_e == ExactProb(3, 4));
  CHECK(ucs.p_ef == ExactProb(1, 2));
  CHECK(ucs.passes());
  const auto ust = ust_check(k3);
  CHECK(ust.p_e == ExactProb(2, 3));
  CHECK(ust.p_ef == ExactProb(1, 3));
  CHECK(ust.passes());
}

TEST_CASE("subgraph enumeration agrees with a subset scan") {
  for (const auto kind : {SubgraphClass::Forest, SubgraphClass::Connected, SubgraphClass::Tree}) {
    for (const auto& g : connected_graphs_upto(5)) {
      const auto fast = enumerate_subgraphs(g, kind);
      const auto slow = brute_subgraphs(g, kind);
      REQUIRE(fast.count() == slow.total);
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        CHECK(fast.count_with(e) == slow.single[e]);
        for (std::size_t f = e + 1; f < g.edge_count(); ++f) CHECK(fast.count_with(e, f) == slow.pair[e][f]);
      }
    }
  }
  CHECK_THROWS_AS(enumerate_subgraphs(SimpleGraph(3, {{0, 1}}), SubgraphClass::Tree), InvalidParameter);
}

TEST_CASE("spanning tree counts follow the matrix-tree theorem") {
  CHECK(enumerate_subgraphs(SimpleGraph::complete(4), SubgraphClass::Tree).count() == 16);
  CHECK(enumerate_subgraphs(SimpleGraph::complete(5), SubgraphClass::Tree).count() == 125);
  CHECK(enumerate_subgraphs(SimpleGraph::cycle(7), SubgraphClass::Tree).count() == 7);
  CHECK(enumerate_subgraphs(SimpleGraph::petersen(), SubgraphClass::Tree).count() == 2000);
}

TEST_CASE("weighted forests reduce to the uniform case at weight one") {
  const auto g = SimpleGraph::cycle(4);
  const auto stats = enumerate_forests(g);
  const auto uniform = correlation_report(stats);
  CHECK(uniform.max_excess == usf_check(g).max_excess);
  // Small weights favour few edges; the report is still well defined.
  const auto light = correlation_report(stats, ExactProb(1, 2));
  CHECK(light.p_e < uniform.p_e);
  CHECK_THROWS_AS(correlation_report(stats, ExactProb(-1)), InvalidParameter);
}

TEST_CASE("witness writers") {
  const auto g = SimpleGraph::complete(3);
  std::ostringstream a, b;
  write_bunkbed_witness(g, bunkbed_check(g, {ExactProb(1, 2)}), a);
  CHECK(a.str().find("graph6: Bw") != std::string::npos);
  write_correlation_witness(g, usf_check(g), b);
  CHECK(b.str().find("excess: ") != std::string::npos);
}
