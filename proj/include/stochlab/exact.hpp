#pragma once
// Exact rational checks of the bunkbed inequality and of pairwise edge
// negative correlation for uniform forests, connected spanning subgraphs
// and spanning trees on small graphs. Everything is counted by subset
// enumeration; probabilities are exact rationals.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stochlab/randstat.hpp"

namespace stochlab {

using ExactProb = boost::multiprecision::cpp_rational;

/// Rational from "a/b", "a" or a terminating decimal such as "0.3".
ExactProb parse_rational(const std::string& text);
std::string to_string(const ExactProb& q);

class SimpleGraph {
 public:
  SimpleGraph() = default;
  /// Throws InvalidParameter on loops, repeated edges or out-of-range ends.
  SimpleGraph(int vertices, std::vector<std::pair<int, int>> edges);

  int vertices() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
  bool has_edge(int a, int b) const noexcept;
  bool connected() const;

  static SimpleGraph complete(int n);
  static SimpleGraph path(int n);
  static SimpleGraph cycle(int n);
  static SimpleGraph petersen();

  friend bool operator==(const SimpleGraph&, const SimpleGraph&) = default;

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;  // (a, b) with a < b, sorted
};

/// graph6 encoding (n <= 62).
SimpleGraph parse_graph6(const std::string& line);
std::string to_graph6(const SimpleGraph& g);

/// Graphs in a graph6 file, one per non-empty line; parse errors carry the
/// line number.
std::vector<SimpleGraph> read_graph6_file(const std::filesystem::path& path);

/// One representative of every isomorphism class of connected simple graphs
/// on exactly n vertices (n <= 6), in a fixed order.
std::vector<SimpleGraph> connected_graphs(int n);
/// Same for every vertex count 1..max_n.
std::vector<SimpleGraph> connected_graphs_upto(int max_n);

// ---------------------------------------------------------------------------
// Bunkbed graph.

struct BunkbedGraph {
  SimpleGraph base;
  // Vertex v of the base graph becomes v (first sheet) and v + n (second).
  std::vector<std::pair<int, int>> edges;
  std::vector<bool> vertical;  // per edge
  int vertices() const noexcept { return 2 * base.vertices(); }
};

BunkbedGraph build_bunkbed(const SimpleGraph& g);

inline constexpr std::size_t kDefaultEdgeCeiling = 24;

/// Counts by number of open edges of the configurations joining u1 to v1 and
/// u1 to v2; P = sum_k c[k] p^k (1-p)^(m-k).
struct BunkbedCounts {
  std::size_t edges = 0;
  std::vector<std::uint64_t> same, cross;
  ExactProb same_probability(const ExactProb& p) const;
  ExactProb cross_probability(const ExactProb& p) const;
};

struct BunkbedProbabilities {
  ExactProb p11, p12;
  ExactProb gap() const { return p11 - p12; }
};

BunkbedProbabilities bunkbed_probabilities(const SimpleGraph& g, int u, int v, const ExactProb& p,
                                           std::size_t ceiling = kDefaultEdgeCeiling);

struct BunkbedReport {
  ExactProb min_gap = 0;
  int u = -1, v = -1;
  ExactProb p = 0;
  ExactProb p11 = 0, p12 = 0;
  std::size_t checked = 0;  // (u, v, p) triples
  bool violated() const { return min_gap < 0; }
};

/// Exact scan over all ordered pairs u != v and the p grid.
BunkbedReport bunkbed_check(const SimpleGraph& g, const std::vector<ExactProb>& p_grid,
                            std::size_t ceiling = kDefaultEdgeCeiling);

/// As bunkbed_check with the vertical edges open exactly on `open_vertical`
/// (a set of base vertices) and only horizontal edges random.
BunkbedReport bunkbed_check_conditional(const SimpleGraph& g, const std::vector<int>& open_vertical,
                                        const std::vector<ExactProb>& p_grid,
                                        std::size_t ceiling = kDefaultEdgeCeiling);

struct BunkbedEstimate {
  EstimateCI same, cross;
  double gap_mean = 0.0;
  double gap_se = 0.0;  // of the paired difference
};

/// Both events are read off the same sampled configuration in each trial.
BunkbedEstimate bunkbed_monte_carlo(const SimpleGraph& g, int u, int v, double p,
                                    std::uint64_t trials, const RngStream& base,
                                    unsigned workers = 0);

// ---------------------------------------------------------------------------
// Random subgraph laws.

enum class SubgraphClass : std::uint8_t { Forest, Connected, Tree };

const char* to_string(SubgraphClass c);
SubgraphClass subgraph_class_from_string(const std::string& s);

/// Counts of the subgraphs of a class, split by edge count k:
/// total[k], single[e][k] (containing e), pair[e][f][k] (containing both).
struct ForestStats {
  SimpleGraph graph;
  SubgraphClass kind = SubgraphClass::Forest;
  std::vector<std::uint64_t> total;
  std::vector<std::vector<std::uint64_t>> single;
  std::vector<std::vector<std::vector<std::uint64_t>>> pair;  // e < f only

  std::uint64_t count() const;
  std::uint64_t count_with(std::size_t e) const;
  std::uint64_t count_with(std::size_t e, std::size_t f) const;
};

/// Enumerates the class on g by backtracking (forests) or subset scan.
ForestStats enumerate_subgraphs(const SimpleGraph& g, SubgraphClass kind,
                                std::size_t ceiling = kDefaultEdgeCeiling);
inline ForestStats enumerate_forests(const SimpleGraph& g,
                                     std::size_t ceiling = kDefaultEdgeCeiling) {
  return enumerate_subgraphs(g, SubgraphClass::Forest, ceiling);
}

struct CorrelationReport {
  SubgraphClass kind = SubgraphClass::Forest;
  ExactProb max_excess = 0;  // max over e != f of P(e,f) - P(e)P(f)
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  ExactProb p_e = 0, p_f = 0, p_ef = 0;
  std::size_t pairs = 0;
  bool passes() const { return max_excess <= 0; }
};

/// `weight` gives each subgraph the weight w^|F| (w = 1: the uniform law;
/// other values give the weighted forest measure).
CorrelationReport correlation_report(const ForestStats& stats, const ExactProb& weight = 1);

CorrelationReport usf_check(const SimpleGraph& g, std::size_t ceiling = kDefaultEdgeCeiling);
CorrelationReport ucs_check(const SimpleGraph& g, std::size_t ceiling = kDefaultEdgeCeiling);
CorrelationReport ust_check(const SimpleGraph& g, std::size_t ceiling = kDefaultEdgeCeiling);

// ---------------------------------------------------------------------------
// Witness files for violations (plain text, "key: value" lines).

void write_bunkbed_witness(const SimpleGraph& g, const BunkbedReport& r, std::ostream& out,
                           const std::vector<int>* open_vertical = nullptr);
void write_correlation_witness(const SimpleGraph& g, const CorrelationReport& r,
                               std::ostream& out);

}  // namespace stochlab
