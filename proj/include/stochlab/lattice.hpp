#pragma once
// Square and hexagonal lattice geometry, sup-norm boxes, lazily sampled bond
// percolation and the diagonal lattice that carries mirror configurations.
//
// The hexagonal lattice uses brick-wall coordinates on Z^2: every site has
// horizontal neighbours (x +/- 1, y), and a third neighbour (x, y + 1) when
// x + y is even, (x, y - 1) when x + y is odd.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stochlab/randstat.hpp"

namespace stochlab {

enum class LatticeKind : std::uint8_t { Square, Hex };

const char* to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(const std::string& name);

struct Site {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(Site, Site) = default;
  friend constexpr auto operator<=>(Site, Site) = default;
};

struct SiteHash {
  std::size_t operator()(Site s) const noexcept {
    return static_cast<std::size_t>(
        mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) |
              static_cast<std::uint32_t>(s.y)));
  }
};

constexpr int sup_norm(Site s) noexcept { return std::max(std::abs(s.x), std::abs(s.y)); }
constexpr bool in_box(Site s, int radius) noexcept { return sup_norm(s) <= radius; }

/// Square-lattice compass heading. The numeric order is clockwise.
enum class Heading : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

inline constexpr std::array<Heading, 4> kHeadings{Heading::N, Heading::E, Heading::S,
                                                  Heading::W};

constexpr Heading reverse(Heading h) noexcept {
  return static_cast<Heading>((static_cast<int>(h) + 2) & 3);
}

constexpr Site step(Site s, Heading h) noexcept {
  switch (h) {
    case Heading::N: return {s.x, s.y + 1};
    case Heading::E: return {s.x + 1, s.y};
    case Heading::S: return {s.x, s.y - 1};
    case Heading::W: return {s.x - 1, s.y};
  }
  return s;
}

char heading_char(Heading h) noexcept;
Heading heading_from_char(char c);

/// Parity of a hexagonal site: even sites have their third edge upward.
constexpr bool hex_points_up(Site s) noexcept { return ((s.x + s.y) & 1) == 0; }

constexpr std::array<Site, 3> hex_neighbors(Site s) noexcept {
  return {Site{s.x + 1, s.y}, Site{s.x - 1, s.y},
          Site{s.x, hex_points_up(s) ? s.y + 1 : s.y - 1}};
}

constexpr int coordination(LatticeKind kind) noexcept {
  return kind == LatticeKind::Square ? 4 : 3;
}

bool adjacent(LatticeKind kind, Site a, Site b) noexcept;

/// Neighbours of `s` on the given lattice (4 or 3 entries).
std::vector<Site> neighbors(LatticeKind kind, Site s);

/// Row-major index of a site inside the box of the given radius.
constexpr std::size_t box_index(Site s, int radius) noexcept {
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  return static_cast<std::size_t>(s.x + radius) * side + static_cast<std::size_t>(s.y + radius);
}

constexpr std::size_t box_sites(int radius) noexcept {
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  return side * side;
}

/// Undirected lattice edge, stored canonically from the endpoint where it
/// leaves in a positive direction (E, or N on the square lattice; the
/// upward edge of an even site on the hexagonal lattice).
struct Edge {
  Site base;
  bool vertical = false;

  friend constexpr bool operator==(Edge, Edge) = default;
};

std::optional<Edge> edge_between(LatticeKind kind, Site a, Site b) noexcept;
Site edge_other_end(Edge e) noexcept;

/// Bond percolation configuration on a sup-norm box.
///
/// Edge states are a pure function of (seed, stream_id, edge) and are
/// computed on demand; edges with an endpoint outside the box are closed.
/// A configuration may also be materialized or edited by hand, after which
/// it reads from an explicit table. Immutable once shared.
class BondConfig {
 public:
  BondConfig(LatticeKind kind, int radius, double p, std::uint64_t seed,
             std::uint64_t stream_id);

  /// All edges closed; edit with set_open to hand-build a configuration.
  static BondConfig empty(LatticeKind kind, int radius);

  LatticeKind kind() const noexcept { return kind_; }
  int radius() const noexcept { return radius_; }
  double density() const noexcept { return p_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  bool materialized() const noexcept { return !table_.empty(); }

  bool is_open(Edge e) const noexcept;
  /// False when a and b are not adjacent or the edge leaves the box.
  bool is_open(Site a, Site b) const noexcept;

  /// Copies every lazily computed state into an explicit table.
  BondConfig materialize() const;
  void set_open(Site a, Site b, bool open);

  /// Every edge with both endpoints in the box, in a fixed order.
  std::vector<Edge> edges() const;

 private:
  bool lazy_state(Edge e) const noexcept;
  std::size_t edge_slot(Edge e) const noexcept;

  LatticeKind kind_;
  int radius_;
  double p_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::vector<std::uint8_t> table_;
};

inline BondConfig sample_bond_config(LatticeKind kind, int radius, double p,
                                     const RngStream& stream) {
  return BondConfig(kind, radius, p, stream.master_seed(), stream.stream_id());
}

/// Open cluster of `v`, sorted.
std::vector<Site> cluster_of(const BondConfig& config, Site v);

/// Writes "x1 y1 x2 y2 open" rows preceded by a commented header.
void export_edge_list(const BondConfig& config, std::ostream& out);

// ---------------------------------------------------------------------------
// Diagonal lattice.
//
// A mirror at site v occupies a diagonal of the unit square centred at v:
// NE runs from v - (1/2, 1/2) to v + (1/2, 1/2), NW from v + (-1/2, 1/2) to
// v + (1/2, -1/2). The square's corners are face centres of Z^2, and the
// corners split into two classes by the parity of floor(x) + floor(y).
// Each diagonal joins two corners of the same class, so every mirror edge
// belongs to exactly one of the two diagonal lattices: NE mirrors at sites
// with x + y even and NW mirrors at sites with x + y odd lie in class 0,
// the others in class 1.

enum class MirrorOrientation : std::uint8_t { NE, NW };

struct DiagonalEdge {
  Site face_centre;
  MirrorOrientation orientation = MirrorOrientation::NE;

  friend constexpr bool operator==(DiagonalEdge, DiagonalEdge) = default;

  /// Endpoints in doubled coordinates (all odd integers).
  std::array<Site, 2> doubled_endpoints() const noexcept;
  /// Which of the two diagonal lattices carries this edge (0 or 1).
  int lattice_class() const noexcept;
};

DiagonalEdge mirror_to_diagonal(Site site, MirrorOrientation orientation) noexcept;

/// Orientation of the class-c diagonal edge through `site`.
constexpr MirrorOrientation class_orientation(Site site, int lattice_class) noexcept {
  const bool even = ((site.x + site.y) & 1) == 0;
  return (even == (lattice_class == 0)) ? MirrorOrientation::NE : MirrorOrientation::NW;
}

}  // namespace stochlab
