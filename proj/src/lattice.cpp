#include "stochlab/lattice.hpp"

#include <deque>
#include <ostream>
#include <unordered_set>

namespace stochlab {

const char* to_string(LatticeKind kind) {
  return kind == LatticeKind::Square ? "square" : "hex";
}

LatticeKind lattice_kind_from_string(const std::string& name) {
  if (name == "square") return LatticeKind::Square;
  if (name == "hex") return LatticeKind::Hex;
  throw InvalidParameter("unknown lattice '" + name + "' (expected square|hex)");
}

char heading_char(Heading h) noexcept { return "NESW"[static_cast<int>(h)]; }

Heading heading_from_char(char c) {
  switch (c) {
    case 'N': return Heading::N;
    case 'E': return Heading::E;
    case 'S': return Heading::S;
    case 'W': return Heading::W;
    default: throw InvalidParameter(std::string("unknown heading '") + c + "'");
  }
}

bool adjacent(LatticeKind kind, Site a, Site b) noexcept {
  return edge_between(kind, a, b).has_value();
}

std::vector<Site> neighbors(LatticeKind kind, Site s) {
  if (kind == LatticeKind::Square)
    return {step(s, Heading::N), step(s, Heading::E), step(s, Heading::S), step(s, Heading::W)};
  const auto h = hex_neighbors(s);
  return {h.begin(), h.end()};
}

std::optional<Edge> edge_between(LatticeKind kind, Site a, Site b) noexcept {
  if (a.y == b.y && std::abs(a.x - b.x) == 1) return Edge{a.x < b.x ? a : b, false};
  if (a.x == b.x && std::abs(a.y - b.y) == 1) {
    const Site lo = a.y < b.y ? a : b;
    if (kind == LatticeKind::Hex && !hex_points_up(lo)) return std::nullopt;
    return Edge{lo, true};
  }
  return std::nullopt;
}

Site edge_other_end(Edge e) noexcept {
  return e.vertical ? Site{e.base.x, e.base.y + 1} : Site{e.base.x + 1, e.base.y};
}

BondConfig::BondConfig(LatticeKind kind, int radius, double p, std::uint64_t seed,
                       std::uint64_t stream_id)
    : kind_(kind),
      radius_(radius),
      p_(p),
      seed_(seed),
      stream_id_(stream_id),
      key_(hash_words(seed, stream_id, 0x626f6e64ULL)) {
  if (radius < 1) throw InvalidParameter("bond config: radius must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("bond config: p must lie in [0,1]");
}

BondConfig BondConfig::empty(LatticeKind kind, int radius) {
  BondConfig c(kind, radius, 0.0, 0, 0);
  c.table_.assign(2 * box_sites(radius), 0);
  return c;
}

std::size_t BondConfig::edge_slot(Edge e) const noexcept {
  return 2 * box_index(e.base, radius_) + (e.vertical ? 1 : 0);
}

bool BondConfig::lazy_state(Edge e) const noexcept {
  const auto bits = hash_words(key_, static_cast<std::uint32_t>(e.base.x),
                               static_cast<std::uint32_t>(e.base.y), e.vertical ? 1u : 0u);
  return to_unit(bits) < p_;
}

bool BondConfig::is_open(Edge e) const noexcept {
  if (!in_box(e.base, radius_) || !in_box(edge_other_end(e), radius_)) return false;
  if (!table_.empty()) return table_[edge_slot(e)] != 0;
  return lazy_state(e);
}

bool BondConfig::is_open(Site a, Site b) const noexcept {
  const auto e = edge_between(kind_, a, b);
  return e && is_open(*e);
}

BondConfig BondConfig::materialize() const {
  BondConfig copy = *this;
  if (!copy.table_.empty()) return copy;
  copy.table_.assign(2 * box_sites(radius_), 0);
  for (const Edge& e : edges()) copy.table_[edge_slot(e)] = lazy_state(e) ? 1 : 0;
  return copy;
}

void BondConfig::set_open(Site a, Site b, bool open) {
  const auto e = edge_between(kind_, a, b);
  if (!e) throw InvalidParameter("set_open: sites are not adjacent");
  if (!in_box(a, radius_) || !in_box(b, radius_))
    throw InvalidParameter("set_open: edge leaves the box");
  if (table_.empty()) *this = materialize();
  table_[edge_slot(*e)] = open ? 1 : 0;
}

std::vector<Edge> BondConfig::edges() const {
  std::vector<Edge> out;
  for (int x = -radius_; x <= radius_; ++x) {
    for (int y = -radius_; y <= radius_; ++y) {
      const Site s{x, y};
      if (x < radius_) out.push_back(Edge{s, false});
      if (y < radius_ && (kind_ == LatticeKind::Square || hex_points_up(s)))
        out.push_back(Edge{s, true});
    }
  }
  return out;
}

std::vector<Site> cluster_of(const BondConfig& config, Site v) {
  if (!in_box(v, config.radius())) throw InvalidParameter("cluster_of: site outside box");
  std::vector<std::uint8_t> seen(box_sites(config.radius()), 0);
  std::vector<Site> out;
  std::deque<Site> queue{v};
  seen[box_index(v, config.radius())] = 1;
  while (!queue.empty()) {
    const Site s = queue.front();
    queue.pop_front();
    out.push_back(s);
    for (const Site n : neighbors(config.kind(), s)) {
      if (!in_box(n, config.radius()) || !config.is_open(s, n)) continue;
      auto& flag = seen[box_index(n, config.radius())];
      if (flag) continue;
      flag = 1;
      queue.push_back(n);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void export_edge_list(const BondConfig& config, std::ostream& out) {
  out << "# bond configuration lattice=" << to_string(config.kind())
      << " radius=" << config.radius() << " p=" << config.density()
      << " seed=" << config.seed() << " stream=" << config.stream_id() << "\n";
  out << "x1 y1 x2 y2 open\n";
  for (const Edge& e : config.edges()) {
    const Site b = edge_other_end(e);
    out << e.base.x << ' ' << e.base.y << ' ' << b.x << ' ' << b.y << ' '
        << (config.is_open(e) ? 1 : 0) << '\n';
  }
}

std::array<Site, 2> DiagonalEdge::doubled_endpoints() const noexcept {
  const int cx = 2 * face_centre.x;
  const int cy = 2 * face_centre.y;
  if (orientation == MirrorOrientation::NE) return {Site{cx - 1, cy - 1}, Site{cx + 1, cy + 1}};
  return {Site{cx - 1, cy + 1}, Site{cx + 1, cy - 1}};
}

int DiagonalEdge::lattice_class() const noexcept {
  const bool even = ((face_centre.x + face_centre.y) & 1) == 0;
  const bool ne = orientation == MirrorOrientation::NE;
  return even == ne ? 0 : 1;
}

DiagonalEdge mirror_to_diagonal(Site site, MirrorOrientation orientation) noexcept {
  return DiagonalEdge{site, orientation};
}

}  // namespace stochlab
