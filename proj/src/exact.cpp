#include "stochlab/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "stochlab/parallel.hpp"

namespace stochlab {

namespace mp = boost::multiprecision;

ExactProb parse_rational(const std::string& text) {
  auto bad = [&] { return InvalidParameter("not a rational number: '" + text + "'"); };
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  std::string s = text;
  bool negative = false;
  if (!s.empty() && s[0] == '-') negative = true, s.erase(0, 1);
  ExactProb q;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    if (!digits(a) || !digits(b)) throw bad();
    const mp::cpp_int den(b);
    if (den == 0) throw bad();
    q = ExactProb(mp::cpp_int(a), den);
  } else if (const auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!digits(whole) || !(frac.empty() || digits(frac))) throw bad();
    mp::cpp_int den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    q = ExactProb(mp::cpp_int(whole + frac), den);
  } else {
    if (!digits(s)) throw bad();
    q = ExactProb(mp::cpp_int(s));
  }
  return negative ? ExactProb(-q) : q;
}

std::string to_string(const ExactProb& q) {
  if (mp::denominator(q) == 1) return mp::numerator(q).str();
  return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

// ---------------------------------------------------------------------------

namespace {

// Union-find with undo, for backtracking enumerations.
class RollbackDsu {
 public:
  explicit RollbackDsu(int n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  // Returns false (and records nothing) when already joined.
  bool unite(int a, int b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }
  void undo() {
    const int b = history_.back();
    history_.pop_back();
    const int a = parent_[b];
    size_[a] -= size_[b];
    parent_[b] = b;
  }
  int components() const { return static_cast<int>(parent_.size() - history_.size()); }

 private:
  std::vector<int> parent_, size_;
  std::vector<int> history_;
};

void check_vertex(const SimpleGraph& g, int v) {
  if (v < 0 || v >= g.vertices()) throw InvalidParameter("vertex out of range");
}

}  // namespace

SimpleGraph::SimpleGraph(int vertices, std::vector<std::pair<int, int>> edges) : n_(vertices) {
  if (vertices < 0) throw InvalidParameter("graph: negative vertex count");
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_ || b >= n_) throw InvalidParameter("graph: edge end out of range");
    if (a == b) throw InvalidParameter("graph: loop at vertex " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (const auto it = std::adjacent_find(edges.begin(), edges.end()); it != edges.end())
    throw InvalidParameter("graph: repeated edge " + std::to_string(it->first) + "-" +
                           std::to_string(it->second));
  edges_ = std::move(edges);
}

bool SimpleGraph::has_edge(int a, int b) const noexcept {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(a, b));
}

bool SimpleGraph::connected() const {
  if (n_ <= 1) return true;
  RollbackDsu dsu(n_);
  for (const auto& [a, b] : edges_) dsu.unite(a, b);
  return dsu.components() == 1;
}

SimpleGraph SimpleGraph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) e.emplace_back(a, b);
  return {n, std::move(e)};
}

SimpleGraph SimpleGraph::path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a + 1 < n; ++a) e.emplace_back(a, a + 1);
  return {n, std::move(e)};
}

SimpleGraph SimpleGraph::cycle(int n) {
  if (n < 3) throw InvalidParameter("cycle: need at least 3 vertices");
  auto e = path(n).edges();
  e.emplace_back(0, n - 1);
  return {n, std::move(e)};
}

SimpleGraph SimpleGraph::petersen() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);
    e.emplace_back(i, i + 5);
    e.emplace_back(5 + i, 5 + (i + 2) % 5);
  }
  return {10, std::move(e)};
}

// graph6: N(n) = n + 63 for n <= 62, then the upper triangle in column
// order (x(0,1), x(0,2), x(1,2), x(0,3), ...) packed six bits per byte.
SimpleGraph parse_graph6(const std::string& raw) {
  std::string line = raw;
  if (line.rfind(">>graph6<<", 0) == 0) line.erase(0, 10);
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  if (line.empty()) throw InvalidParameter("graph6: empty line");
  for (const char c : line)
    if (c < 63 || c > 126) throw InvalidParameter("graph6: invalid character");
  const int n = line[0] - 63;
  if (n > 62) throw InvalidParameter("graph6: only graphs with at most 62 vertices are supported");
  const std::size_t bits = static_cast<std::size_t>(n) * (n - 1) / 2;
  if (line.size() != 1 + (bits + 5) / 6) throw InvalidParameter("graph6: wrong length for n = " + std::to_string(n));
  std::vector<std::pair<int, int>> edges;
  std::size_t k = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i, ++k) {
      const int byte = line[1 + k / 6] - 63;
      if ((byte >> (5 - k % 6)) & 1) edges.emplace_back(i, j);
    }
  if (bits % 6 != 0 && ((line.back() - 63) & ((1 << (6 - bits % 6)) - 1)) != 0)
    throw InvalidParameter("graph6: nonzero padding bits");
  return {n, std::move(edges)};
}

std::string to_graph6(const SimpleGraph& g) {
  const int n = g.vertices();
  if (n > 62) throw InvalidParameter("graph6: only graphs with at most 62 vertices are supported");
  const std::size_t bits = static_cast<std::size_t>(n) * (n - 1) / 2;
  std::string out(1 + (bits + 5) / 6, 0);
  out[0] = static_cast<char>(n + 63);
  std::size_t k = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i, ++k)
      if (g.has_edge(i, j)) out[1 + k / 6] = static_cast<char>(out[1 + k / 6] | (1 << (5 - k % 6)));
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = static_cast<char>(out[i] + 63);
  return out;
}

std::vector<SimpleGraph> read_graph6_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open graph file " + path.string());
  std::vector<SimpleGraph> out;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.empty() || line == "\r") continue;
    try {
      out.push_back(parse_graph6(line));
    } catch (const InvalidParameter& e) {
      throw InvalidParameter(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SimpleGraph> connected_graphs(int n) {
  if (n < 1 || n > 6) throw InvalidParameter("connected_graphs: n must lie in [1, 6]");
  // Edge slots in graph6 order; a graph is a bit mask over slots.
  std::vector<std::pair<int, int>> slots;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) slots.emplace_back(i, j);
  auto slot_of = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    return b * (b - 1) / 2 + a;
  };
  std::vector<std::vector<int>> perm_maps;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<int> m(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) m[s] = slot_of(perm[slots[s].first], perm[slots[s].second]);
    perm_maps.push_back(std::move(m));
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::set<std::uint32_t> canonical;
  const std::uint32_t limit = 1u << slots.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    RollbackDsu dsu(n);
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (mask >> s & 1) dsu.unite(slots[s].first, slots[s].second);
    if (dsu.components() != 1) continue;
    std::uint32_t best = mask;
    for (const auto& m : perm_maps) {
      std::uint32_t image = 0;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask >> s & 1) image |= 1u << m[s];
      best = std::min(best, image);
    }
    canonical.insert(best);
  }
  std::vector<SimpleGraph> out;
  for (const auto mask : canonical) {
    std::vector<std::pair<int, int>> e;
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (mask >> s & 1) e.push_back(slots[s]);
    out.emplace_back(n, std::move(e));
  }
  return out;
}

std::vector<SimpleGraph> connected_graphs_upto(int max_n) {
  std::vector<SimpleGraph> out;
  for (int n = 1; n <= max_n; ++n) {
    auto g = connected_graphs(n);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

BunkbedGraph build_bunkbed(const SimpleGraph& g) {
  BunkbedGraph b;
  b.base = g;
  const int n = g.vertices();
  for (const auto& [x, y] : g.edges()) {
    b.edges.emplace_back(x, y);
    b.vertical.push_back(false);
  }
  for (const auto& [x, y] : g.edges()) {
    b.edges.emplace_back(x + n, y + n);
    b.vertical.push_back(false);
  }
  for (int v = 0; v < n; ++v) {
    b.edges.emplace_back(v, v + n);
    b.vertical.push_back(true);
  }
  return b;
}

namespace {

ExactProb evaluate(const std::vector<std::uint64_t>& c, std::size_t m, const ExactProb& p) {
  const ExactProb q = 1 - p;
  std::vector<ExactProb> pp(m + 1, 1), qq(m + 1, 1);
  for (std::size_t k = 1; k <= m; ++k) pp[k] = pp[k - 1] * p, qq[k] = qq[k - 1] * q;
  ExactProb total = 0;
  for (std::size_t k = 0; k <= m; ++k)
    if (c[k]) total += ExactProb(c[k]) * pp[k] * qq[m - k];
  return total;
}

// counts[u * n + v] for every ordered pair, over the random edges only.
std::vector<BunkbedCounts> bunkbed_all_counts(const SimpleGraph& g,
                                              const std::vector<int>* open_vertical,
                                              std::size_t ceiling) {
  const BunkbedGraph b = build_bunkbed(g);
  const int n = g.vertices();
  RollbackDsu dsu(2 * n);
  std::vector<std::pair<int, int>> random_edges;
  for (std::size_t e = 0; e < b.edges.size(); ++e) {
    if (open_vertical && b.vertical[e]) continue;
    random_edges.push_back(b.edges[e]);
  }
  if (open_vertical)
    for (const int v : *open_vertical) {
      check_vertex(g, v);
      dsu.unite(v, v + n);
    }
  const std::size_t m = random_edges.size();
  if (m > ceiling)
    throw ResourceLimit("bunkbed: " + std::to_string(m) + " random edges exceed the enumeration ceiling of " +
                        std::to_string(ceiling) + "; use the Monte Carlo estimate");
  std::vector<BunkbedCounts> counts(static_cast<std::size_t>(n) * n);
  for (auto& c : counts) {
    c.edges = m;
    c.same.assign(m + 1, 0);
    c.cross.assign(m + 1, 0);
  }
  std::vector<int> root(2 * n);
  auto leaf = [&](std::size_t k) {
    for (int x = 0; x < 2 * n; ++x) root[x] = dsu.find(x);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        auto& c = counts[static_cast<std::size_t>(u) * n + v];
        c.same[k] += root[u] == root[v];
        c.cross[k] += root[u] == root[v + n];
      }
  };
  auto recurse = [&](auto&& self, std::size_t e, std::size_t open) -> void {
    if (e == m) return leaf(open);
    self(self, e + 1, open);
    const bool joined = dsu.unite(random_edges[e].first, random_edges[e].second);
    self(self, e + 1, open + 1);
    if (joined) dsu.undo();
  };
  recurse(recurse, 0, 0);
  return counts;
}

BunkbedReport scan_counts(const SimpleGraph& g, const std::vector<BunkbedCounts>& counts,
                          const std::vector<ExactProb>& p_grid) {
  for (const auto& p : p_grid)
    if (p < 0 || p > 1) throw InvalidParameter("bunkbed: p must lie in [0, 1]");
  BunkbedReport r;
  const int n = g.vertices();
  bool first = true;
  for (const auto& p : p_grid)
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        const auto& c = counts[static_cast<std::size_t>(u) * n + v];
        const ExactProb p11 = c.same_probability(p), p12 = c.cross_probability(p);
        const ExactProb gap = p11 - p12;
        ++r.checked;
        if (first || gap < r.min_gap) {
          first = false;
          r.min_gap = gap;
          r.u = u, r.v = v, r.p = p, r.p11 = p11, r.p12 = p12;
        }
      }
  return r;
}

}  // namespace

ExactProb BunkbedCounts::same_probability(const ExactProb& p) const { return evaluate(same, edges, p); }
ExactProb BunkbedCounts::cross_probability(const ExactProb& p) const { return evaluate(cross, edges, p); }

BunkbedProbabilities bunkbed_probabilities(const SimpleGraph& g, int u, int v, const ExactProb& p,
                                           std::size_t ceiling) {
  check_vertex(g, u);
  check_vertex(g, v);
  if (u == v) throw InvalidParameter("bunkbed: u and v must differ");
  if (p < 0 || p > 1) throw InvalidParameter("bunkbed: p must lie in [0, 1]");
  const auto counts = bunkbed_all_counts(g, nullptr, ceiling);
  const auto& c = counts[static_cast<std::size_t>(u) * g.vertices() + v];
  return {c.same_probability(p), c.cross_probability(p)};
}

BunkbedReport bunkbed_check(const SimpleGraph& g, const std::vector<ExactProb>& p_grid,
                            std::size_t ceiling) {
  return scan_counts(g, bunkbed_all_counts(g, nullptr, ceiling), p_grid);
}

BunkbedReport bunkbed_check_conditional(const SimpleGraph& g, const std::vector<int>& open_vertical,
                                        const std::vector<ExactProb>& p_grid, std::size_t ceiling) {
  return scan_counts(g, bunkbed_all_counts(g, &open_vertical, ceiling), p_grid);
}

BunkbedEstimate bunkbed_monte_carlo(const SimpleGraph& g, int u, int v, double p,
                                    std::uint64_t trials, const RngStream& base, unsigned workers) {
  check_vertex(g, u);
  check_vertex(g, v);
  if (u == v) throw InvalidParameter("bunkbed: u and v must differ");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("bunkbed: p must lie in [0, 1]");
  if (trials == 0) throw InvalidParameter("bunkbed: trials must be >= 1");
  const BunkbedGraph b = build_bunkbed(g);
  const int n = g.vertices();
  // Bit 0: u1 ~ v1, bit 1: u1 ~ v2.
  std::vector<unsigned char> outcome(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    RngStream s = base.child(i);
    RollbackDsu dsu(2 * n);
    for (const auto& [x, y] : b.edges)
      if (sample_bernoulli(s, p)) dsu.unite(x, y);
    const int ru = dsu.find(u);
    outcome[i] = static_cast<unsigned char>((ru == dsu.find(v)) | ((ru == dsu.find(v + n)) << 1));
  });
  std::uint64_t same = 0, cross = 0;
  double sum = 0, sum2 = 0;
  for (const auto o : outcome) {
    same += o & 1;
    cross += o >> 1;
    const double d = double(o & 1) - double(o >> 1);
    sum += d;
    sum2 += d * d;
  }
  BunkbedEstimate est{estimate_proportion(same, trials), estimate_proportion(cross, trials), 0, 0};
  const double t = double(trials);
  est.gap_mean = sum / t;
  if (trials > 1) est.gap_se = std::sqrt(std::max(0.0, (sum2 - sum * sum / t) / (t - 1.0)) / t);
  return est;
}

// ---------------------------------------------------------------------------

const char* to_string(SubgraphClass c) {
  switch (c) {
    case SubgraphClass::Forest: return "usf";
    case SubgraphClass::Connected: return "ucs";
    default: return "ust";
  }
}

SubgraphClass subgraph_class_from_string(const std::string& s) {
  if (s == "usf" || s == "forest") return SubgraphClass::Forest;
  if (s == "ucs" || s == "connected") return SubgraphClass::Connected;
  if (s == "ust" || s == "tree") return SubgraphClass::Tree;
  throw InvalidParameter("unknown subgraph class '" + s + "' (expected usf, ucs or ust)");
}

std::uint64_t ForestStats::count() const { return std::accumulate(total.begin(), total.end(), std::uint64_t{0}); }

std::uint64_t ForestStats::count_with(std::size_t e) const {
  return std::accumulate(single.at(e).begin(), single.at(e).end(), std::uint64_t{0});
}

std::uint64_t ForestStats::count_with(std::size_t e, std::size_t f) const {
  if (e > f) std::swap(e, f);
  if (e == f) return count_with(e);
  return std::accumulate(pair.at(e).at(f).begin(), pair.at(e).at(f).end(), std::uint64_t{0});
}

ForestStats enumerate_subgraphs(const SimpleGraph& g, SubgraphClass kind, std::size_t ceiling) {
  const std::size_t m = g.edge_count();
  if (m > ceiling)
    throw ResourceLimit("subgraph enumeration: " + std::to_string(m) + " edges exceed the ceiling of " +
                        std::to_string(ceiling));
  if (m > 31) throw ResourceLimit("subgraph enumeration: at most 31 edges");
  if (kind != SubgraphClass::Forest && !g.connected())
    throw InvalidParameter(std::string(to_string(kind)) + ": the graph must be connected");
  ForestStats st;
  st.graph = g;
  st.kind = kind;
  st.total.assign(m + 1, 0);
  st.single.assign(m, std::vector<std::uint64_t>(m + 1, 0));
  st.pair.assign(m, std::vector<std::vector<std::uint64_t>>(m));
  for (std::size_t e = 0; e < m; ++e)
    for (std::size_t f = e + 1; f < m; ++f) st.pair[e][f].assign(m + 1, 0);

  std::vector<std::size_t> chosen;
  auto record = [&] {
    const std::size_t k = chosen.size();
    ++st.total[k];
    for (std::size_t a = 0; a < k; ++a) {
      ++st.single[chosen[a]][k];
      for (std::size_t b = a + 1; b < k; ++b) ++st.pair[chosen[a]][chosen[b]][k];
    }
  };
  const auto& edges = g.edges();
  const int n = g.vertices();
  RollbackDsu dsu(std::max(n, 1));

  if (kind == SubgraphClass::Connected) {
    // Every subset, kept when spanning and connected.
    auto recurse = [&](auto&& self, std::size_t e) -> void {
      if (e == m) {
        if (dsu.components() == 1) record();
        return;
      }
      self(self, e + 1);
      const bool joined = dsu.unite(edges[e].first, edges[e].second);
      chosen.push_back(e);
      self(self, e + 1);
      chosen.pop_back();
      if (joined) dsu.undo();
    };
    recurse(recurse, 0);
    return st;
  }
  // Forests: only add edges that join two components.
  const bool trees_only = kind == SubgraphClass::Tree;
  auto recurse = [&](auto&& self, std::size_t e) -> void {
    if (e == m) {
      if (!trees_only || dsu.components() == 1) record();
      return;
    }
    // A spanning tree still needs components - 1 of the remaining edges.
    if (trees_only && static_cast<std::size_t>(dsu.components() - 1) > m - e) return;
    self(self, e + 1);
    if (dsu.unite(edges[e].first, edges[e].second)) {
      chosen.push_back(e);
      self(self, e + 1);
      chosen.pop_back();
      dsu.undo();
    }
  };
  recurse(recurse, 0);
  return st;
}

CorrelationReport correlation_report(const ForestStats& st, const ExactProb& weight) {
  if (weight <= 0) throw InvalidParameter("correlation_report: weight must be positive");
  const std::size_t m = st.graph.edge_count();
  std::vector<ExactProb> w(m + 1, 1);
  for (std::size_t k = 1; k <= m; ++k) w[k] = w[k - 1] * weight;
  auto weigh = [&](const std::vector<std::uint64_t>& c) {
    ExactProb s = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k]) s += ExactProb(c[k]) * w[k];
    return s;
  };
  const ExactProb z = weigh(st.total);
  if (z == 0) throw InvalidParameter("correlation_report: the class is empty on this graph");
  std::vector<ExactProb> pe(m);
  for (std::size_t e = 0; e < m; ++e) pe[e] = weigh(st.single[e]) / z;
  CorrelationReport r;
  r.kind = st.kind;
  bool first = true;
  for (std::size_t e = 0; e < m; ++e)
    for (std::size_t f = e + 1; f < m; ++f) {
      const ExactProb pef = weigh(st.pair[e][f]) / z;
      const ExactProb excess = pef - pe[e] * pe[f];
      ++r.pairs;
      if (first || excess > r.max_excess) {
        first = false;
        r.max_excess = excess;
        r.witness = {e, f};
        r.p_e = pe[e], r.p_f = pe[f], r.p_ef = pef;
      }
    }
  return r;
}

CorrelationReport usf_check(const SimpleGraph& g, std::size_t ceiling) {
  return correlation_report(enumerate_subgraphs(g, SubgraphClass::Forest, ceiling));
}

CorrelationReport ucs_check(const SimpleGraph& g, std::size_t ceiling) {
  return correlation_report(enumerate_subgraphs(g, SubgraphClass::Connected, ceiling));
}

CorrelationReport ust_check(const SimpleGraph& g, std::size_t ceiling) {
  return correlation_report(enumerate_subgraphs(g, SubgraphClass::Tree, ceiling));
}

// ---------------------------------------------------------------------------

namespace {

void write_graph(const SimpleGraph& g, std::ostream& out) {
  out << "graph6: " << to_graph6(g) << '\n';
  out << "vertices: " << g.vertices() << '\n';
  out << "edges:";
  for (const auto& [a, b] : g.edges()) out << ' ' << a << '-' << b;
  out << '\n';
}

}  // namespace

void write_bunkbed_witness(const SimpleGraph& g, const BunkbedReport& r, std::ostream& out,
                           const std::vector<int>* open_vertical) {
  out << "kind: bunkbed" << (open_vertical ? "-conditional" : "") << '\n';
  write_graph(g, out);
  if (open_vertical) {
    out << "open_vertical:";
    for (const int v : *open_vertical) out << ' ' << v;
    out << '\n';
  }
  out << "u: " << r.u << "\nv: " << r.v << "\np: " << to_string(r.p) << '\n';
  out << "P(u1~v1): " << to_string(r.p11) << "\nP(u1~v2): " << to_string(r.p12) << '\n';
  out << "gap: " << to_string(r.min_gap) << '\n';
}

void write_correlation_witness(const SimpleGraph& g, const CorrelationReport& r, std::ostream& out) {
  out << "kind: " << to_string(r.kind) << '\n';
  write_graph(g, out);
  if (r.witness) {
    const auto& e = g.edges()[r.witness->first];
    const auto& f = g.edges()[r.witness->second];
    out << "e: " << e.first << '-' << e.second << "\nf: " << f.first << '-' << f.second << '\n';
  }
  out << "P(e): " << to_string(r.p_e) << "\nP(f): " << to_string(r.p_f) << '\n';
  out << "P(e,f): " << to_string(r.p_ef) << "\nexcess: " << to_string(r.max_excess) << '\n';
}

}  // namespace stochlab
