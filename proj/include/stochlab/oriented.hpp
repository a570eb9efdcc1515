#pragma once
// The randomly oriented square lattice: each horizontal edge points right
// with probability p (else left), each vertical edge up with probability p
// (else down). Reachability follows edges in their direction only.

#include <cstdint>
#include <map>
#include <vector>

#include "stochlab/lattice.hpp"
#include "stochlab/randstat.hpp"

namespace stochlab {

class OrientedConfig {
 public:
  /// `enhance` > 0 additionally opens each edge in the right/up direction
  /// with probability `enhance`, independently of its orientation.
  OrientedConfig(int radius, double p, std::uint64_t seed, std::uint64_t stream_id,
                 double enhance = 0.0);
  OrientedConfig(int radius, double p, const RngStream& stream, double enhance = 0.0)
      : OrientedConfig(radius, p, stream.master_seed(), stream.stream_id(), enhance) {}

  int radius() const noexcept { return radius_; }
  double density() const noexcept { return p_; }
  double enhancement() const noexcept { return enhance_; }

  /// True when the edge points right (horizontal) or up (vertical).
  bool forward(Edge e) const noexcept;
  /// True when the edge carries an extra right/up passage.
  bool enhanced(Edge e) const noexcept;
  /// Whether a step from `s` in heading h is allowed.
  bool traversable(Site s, Heading h) const noexcept;

  /// Overrides the sampled direction of one edge (hand-built configurations).
  void set_forward(Edge e, bool forward);
  void set_enhanced(Edge e, bool enhanced);

 private:
  static std::uint64_t edge_key(Edge e) noexcept;

  int radius_;
  double p_;
  double enhance_;
  std::uint64_t key_;
  std::map<std::uint64_t, bool> forward_override_, enhance_override_;
};

inline OrientedConfig sample_oriented(int radius, double p, const RngStream& stream,
                                      double enhance = 0.0) {
  return OrientedConfig(radius, p, stream, enhance);
}

struct ReachResult {
  std::vector<Site> reached;  // sorted
  bool touched_boundary = false;
  std::vector<std::size_t> frontier_sizes;  // BFS layer sizes, starting with {1}
};

/// Full breadth-first closure from the origin inside the box.
ReachResult reachable_from_origin(const OrientedConfig& config);

/// Whether the box boundary is reachable from the origin; stops as soon as
/// it is (depth first, preferring the likelier outward headings).
bool touches_boundary(const OrientedConfig& config);

EstimateCI estimate_theta_oriented(double p, int radius, std::uint64_t trials,
                                   const RngStream& base, unsigned workers = 0,
                                   double enhance = 0.0);

struct SymmetryReport {
  EstimateCI at_p, at_complement;
  double distance = 0.0;  // |difference| in pooled standard errors
};

/// Estimates at p and 1 - p on disjoint streams.
SymmetryReport symmetry_report(double p, int radius, std::uint64_t trials, const RngStream& base,
                               unsigned workers = 0);

}  // namespace stochlab
