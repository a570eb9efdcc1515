#pragma once
// Ray tracing among two-sided mirrors on the vertices of Z^2: the Ehrenfest
// wind/tree model and Manhattan pinball.
//
// Convention: an NE mirror lies along the NE-SW diagonal ("/") and exchanges
// N<->E and S<->W; an NW mirror lies along the NW-SE diagonal ("\") and
// exchanges N<->W and S<->E. The ray lives on vertices; a mirror acts when
// the ray enters its vertex. The mirror at the starting vertex is ignored on
// departure, so the ray leaves the start in its given heading.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "stochlab/lattice.hpp"
#include "stochlab/randstat.hpp"

namespace stochlab {

enum class MirrorState : std::uint8_t { Empty, NE, NW };

constexpr Heading reflect(MirrorOrientation m, Heading h) noexcept {
  const int v = static_cast<int>(h);
  return static_cast<Heading>(m == MirrorOrientation::NE ? (v ^ 1) : (3 - v));
}

constexpr Heading apply_mirror(MirrorState s, Heading h) noexcept {
  switch (s) {
    case MirrorState::NE: return reflect(MirrorOrientation::NE, h);
    case MirrorState::NW: return reflect(MirrorOrientation::NW, h);
    default: return h;
  }
}

/// Ehrenfest mirror field: each vertex holds a mirror with probability p,
/// NE or NW with probability 1/2 each. States are a pure function of
/// (seed, stream_id, site); a field can also be given explicitly.
class MirrorField {
 public:
  MirrorField(double p, int radius, std::uint64_t seed, std::uint64_t stream_id,
              bool swap_convention = false);
  MirrorField(double p, int radius, const RngStream& stream, bool swap_convention = false)
      : MirrorField(p, radius, stream.master_seed(), stream.stream_id(), swap_convention) {}

  /// Field with the listed mirrors and nothing elsewhere.
  static MirrorField explicit_field(int radius, std::map<Site, MirrorState> mirrors);

  MirrorState state(Site s) const noexcept;
  double density() const noexcept { return p_; }
  int radius() const noexcept { return radius_; }

 private:
  double p_;
  int radius_;
  std::uint64_t key_;
  bool swap_;
  bool explicit_ = false;
  std::map<Site, MirrorState> mirrors_;
};

struct RayState {
  Site site;
  Heading heading = Heading::N;

  friend constexpr bool operator==(RayState, RayState) = default;
};

enum class TraceKind : std::uint8_t { Escaped, Looped, Exhausted };

const char* to_string(TraceKind kind);

struct TraceOutcome {
  TraceKind kind = TraceKind::Exhausted;
  std::uint64_t steps = 0;       // steps taken until the outcome was decided
  std::uint64_t period = 0;      // Looped only
  std::uint64_t loop_start = 0;  // Looped only; always 0 (the dynamics are invertible)
};

/// Number of (site, heading) states in a box; a step budget of this size
/// always decides Escaped or Looped.
constexpr std::uint64_t state_budget(int radius) noexcept {
  return 4ULL * box_sites(radius);
}

TraceOutcome trace_ray(const MirrorField& field, RayState start, int radius,
                       std::uint64_t max_steps);

/// States visited by the first `steps` steps (or until the ray leaves the
/// box), starting with `start`.
std::vector<RayState> trace_path(const MirrorField& field, RayState start, int radius,
                                 std::uint64_t steps);

void dump_path(std::span<const RayState> path, std::ostream& out);

/// Proportion of trials whose northward ray from the origin leaves the box.
EstimateCI estimate_theta_ehrenfest(double p, int radius, std::uint64_t trials,
                                    const RngStream& base, unsigned workers = 0,
                                    bool swap_convention = false);

/// True when mirrors of one diagonal-lattice class form a circuit around the
/// origin inside the box (the origin's own mirror excluded). `lattice_class`
/// restricts the search to class 0 or 1; by default either class counts.
bool blocked_by_circuit(const MirrorField& field, int radius, int lattice_class = -1);

// ---------------------------------------------------------------------------
// Manhattan pinball.
//
// Streets: row y runs east when y is even, west when odd; column x runs
// north when x is even, south when odd (either pattern can be flipped).
// Each vertex independently carries, with probability q, the mirror that
// turns one incoming street into the other outgoing street, i.e. an open
// edge of the diagonal lattice whose class matches the street pattern.

class ManhattanField {
 public:
  ManhattanField(double q, int radius, std::uint64_t seed, std::uint64_t stream_id,
                 bool flip_rows = false, bool flip_columns = false);
  ManhattanField(double q, int radius, const RngStream& stream, bool flip_rows = false,
                 bool flip_columns = false)
      : ManhattanField(q, radius, stream.master_seed(), stream.stream_id(), flip_rows,
                       flip_columns) {}

  /// Field with open diagonals exactly at the listed sites.
  static ManhattanField explicit_field(int radius, std::vector<Site> open_sites,
                                       bool flip_rows = false, bool flip_columns = false);

  Heading row_heading(int y) const noexcept;
  Heading column_heading(int x) const noexcept;
  bool admissible(RayState s) const noexcept;
  /// Class of the diagonal lattice whose edges are consistent with the streets.
  int diagonal_class() const noexcept;
  bool open(Site s) const noexcept;
  MirrorState state(Site s) const noexcept;
  double density() const noexcept { return q_; }

 private:
  double q_;
  int radius_;
  std::uint64_t key_;
  bool flip_rows_;
  bool flip_columns_;
  bool explicit_ = false;
  std::vector<Site> open_sites_;  // sorted
};

/// Throws InvalidParameter when the start heading disagrees with its street.
TraceOutcome trace_manhattan(const ManhattanField& field, RayState start, int radius,
                             std::uint64_t max_steps);

std::vector<RayState> trace_manhattan_path(const ManhattanField& field, RayState start,
                                           int radius, std::uint64_t steps);

/// Proportion of trials whose northward ray from the origin leaves the box.
EstimateCI estimate_theta_manhattan(double q, int radius, std::uint64_t trials,
                                    const RngStream& base, unsigned workers = 0,
                                    bool flip_rows = false, bool flip_columns = false);

}  // namespace stochlab
