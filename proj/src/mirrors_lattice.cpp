#include "stochlab/mirrors_lattice.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include "stochlab/parallel.hpp"

namespace stochlab {

const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Escaped: return "escaped";
    case TraceKind::Looped: return "looped";
    default: return "exhausted";
  }
}

MirrorField::MirrorField(double p, int radius, std::uint64_t seed, std::uint64_t stream_id,
                         bool swap_convention)
    : p_(p), radius_(radius), key_(hash_words(seed, stream_id, 0x6d6972ULL)), swap_(swap_convention) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("mirror field: p must lie in [0,1]");
  if (radius < 1) throw InvalidParameter("mirror field: radius must be >= 1");
}

MirrorField MirrorField::explicit_field(int radius, std::map<Site, MirrorState> mirrors) {
  MirrorField f(0.0, radius, 0, 0);
  f.explicit_ = true;
  f.mirrors_ = std::move(mirrors);
  return f;
}

MirrorState MirrorField::state(Site s) const noexcept {
  if (explicit_) {
    const auto it = mirrors_.find(s);
    return it == mirrors_.end() ? MirrorState::Empty : it->second;
  }
  const std::uint64_t h = hash_words(key_, static_cast<std::uint32_t>(s.x),
                                     static_cast<std::uint32_t>(s.y));
  if (!(to_unit(h) < p_)) return MirrorState::Empty;
  const bool ne = ((h & 1) == 0) != swap_;
  return ne ? MirrorState::NE : MirrorState::NW;
}

namespace {

template <class Lookup>
TraceOutcome trace_generic(const Lookup& lookup, RayState start, int radius,
                           std::uint64_t max_steps) {
  if (!in_box(start.site, radius)) throw InvalidParameter("trace: start outside box");
  RayState s = start;
  for (std::uint64_t t = 1; t <= max_steps; ++t) {
    s.site = step(s.site, s.heading);
    if (!in_box(s.site, radius)) return {TraceKind::Escaped, t, 0, 0};
    s.heading = apply_mirror(lookup(s.site), s.heading);
    // The step map is a bijection on states, so a bounded orbit is purely
    // periodic and first repeats its initial state.
    if (s == start) return {TraceKind::Looped, t, t, 0};
  }
  return {TraceKind::Exhausted, max_steps, 0, 0};
}

template <class Lookup>
std::vector<RayState> path_generic(const Lookup& lookup, RayState start, int radius,
                                   std::uint64_t steps) {
  std::vector<RayState> path{start};
  RayState s = start;
  for (std::uint64_t t = 0; t < steps; ++t) {
    s.site = step(s.site, s.heading);
    if (!in_box(s.site, radius)) {
      path.push_back(s);
      break;
    }
    s.heading = apply_mirror(lookup(s.site), s.heading);
    path.push_back(s);
  }
  return path;
}

}  // namespace

TraceOutcome trace_ray(const MirrorField& field, RayState start, int radius,
                       std::uint64_t max_steps) {
  return trace_generic([&](Site s) { return field.state(s); }, start, radius, max_steps);
}

std::vector<RayState> trace_path(const MirrorField& field, RayState start, int radius,
                                 std::uint64_t steps) {
  return path_generic([&](Site s) { return field.state(s); }, start, radius, steps);
}

void dump_path(std::span<const RayState> path, std::ostream& out) {
  out << "step x y heading\n";
  for (std::size_t i = 0; i < path.size(); ++i)
    out << i << ' ' << path[i].site.x << ' ' << path[i].site.y << ' '
        << heading_char(path[i].heading) << '\n';
}

EstimateCI estimate_theta_ehrenfest(double p, int radius, std::uint64_t trials,
                                    const RngStream& base, unsigned workers,
                                    bool swap_convention) {
  if (trials == 0) throw InvalidParameter("estimate_theta_ehrenfest: trials must be >= 1");
  const auto budget = state_budget(radius);
  const auto hits = count_successes(trials, workers, [&](std::size_t i) {
    const MirrorField field(p, radius, base.child(i), swap_convention);
    return trace_ray(field, {{0, 0}, Heading::N}, radius, budget).kind == TraceKind::Escaped;
  });
  return estimate_proportion(hits, trials);
}

// Faces of Z^2 are named by their lower-left corner (a, b). For a mirror
// class c the dual faces have parity a + b = 1 - c; two dual faces are
// joined through the vertex they share diagonally, and that passage is
// closed exactly when the vertex carries the class-c mirror. The origin is
// surrounded iff a dual face next to it cannot reach the box boundary.
bool blocked_by_circuit(const MirrorField& field, int radius, int lattice_class) {
  if (lattice_class != -1 && lattice_class != 0 && lattice_class != 1)
    throw InvalidParameter("blocked_by_circuit: class must be 0, 1 or -1");
  auto blocked_in_class = [&](int c) {
    const Site start = c == 0 ? Site{-1, 0} : Site{-1, -1};
    const int side = 2 * radius + 2;  // faces with corners in [-radius-1, radius+1]
    auto face_index = [&](Site f) {
      return static_cast<std::size_t>(f.x + radius + 1) * static_cast<std::size_t>(side + 1) +
             static_cast<std::size_t>(f.y + radius + 1);
    };
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(side + 1) * (side + 1), 0);
    std::deque<Site> queue{start};
    seen[face_index(start)] = 1;
    while (!queue.empty()) {
      const Site f = queue.front();
      queue.pop_front();
      const Site corners[4] = {{f.x, f.y}, {f.x + 1, f.y}, {f.x, f.y + 1}, {f.x + 1, f.y + 1}};
      for (const Site v : corners) {
        if (!in_box(v, radius)) return false;
        const bool is_origin = v == Site{0, 0};
        if (!is_origin) {
          const auto m = field.state(v);
          const auto wall = class_orientation(v, c) == MirrorOrientation::NE ? MirrorState::NE
                                                                             : MirrorState::NW;
          if (m == wall) continue;
        }
        const Site next{2 * v.x - f.x - 1, 2 * v.y - f.y - 1};
        auto& flag = seen[face_index(next)];
        if (flag) continue;
        flag = 1;
        queue.push_back(next);
      }
    }
    return true;
  };
  if (lattice_class >= 0) return blocked_in_class(lattice_class);
  return blocked_in_class(0) || blocked_in_class(1);
}

// ---------------------------------------------------------------------------

ManhattanField::ManhattanField(double q, int radius, std::uint64_t seed,
                               std::uint64_t stream_id, bool flip_rows, bool flip_columns)
    : q_(q),
      radius_(radius),
      key_(hash_words(seed, stream_id, 0x6d616e68ULL)),
      flip_rows_(flip_rows),
      flip_columns_(flip_columns) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("manhattan field: q must lie in [0,1]");
  if (radius < 1) throw InvalidParameter("manhattan field: radius must be >= 1");
}

ManhattanField ManhattanField::explicit_field(int radius, std::vector<Site> open_sites,
                                              bool flip_rows, bool flip_columns) {
  ManhattanField f(0.0, radius, 0, 0, flip_rows, flip_columns);
  f.explicit_ = true;
  std::sort(open_sites.begin(), open_sites.end());
  f.open_sites_ = std::move(open_sites);
  return f;
}

Heading ManhattanField::row_heading(int y) const noexcept {
  return (((y & 1) == 0) != flip_rows_) ? Heading::E : Heading::W;
}

Heading ManhattanField::column_heading(int x) const noexcept {
  return (((x & 1) == 0) != flip_columns_) ? Heading::N : Heading::S;
}

bool ManhattanField::admissible(RayState s) const noexcept {
  if (s.heading == Heading::E || s.heading == Heading::W)
    return s.heading == row_heading(s.site.y);
  return s.heading == column_heading(s.site.x);
}

int ManhattanField::diagonal_class() const noexcept { return flip_rows_ != flip_columns_ ? 1 : 0; }

bool ManhattanField::open(Site s) const noexcept {
  if (explicit_) return std::binary_search(open_sites_.begin(), open_sites_.end(), s);
  const std::uint64_t h = hash_words(key_, static_cast<std::uint32_t>(s.x),
                                     static_cast<std::uint32_t>(s.y));
  return to_unit(h) < q_;
}

MirrorState ManhattanField::state(Site s) const noexcept {
  if (!open(s)) return MirrorState::Empty;
  return class_orientation(s, diagonal_class()) == MirrorOrientation::NE ? MirrorState::NE
                                                                          : MirrorState::NW;
}

TraceOutcome trace_manhattan(const ManhattanField& field, RayState start, int radius,
                             std::uint64_t max_steps) {
  if (!field.admissible(start))
    throw InvalidParameter("trace_manhattan: start heading disagrees with the street orientation");
  return trace_generic([&](Site s) { return field.state(s); }, start, radius, max_steps);
}

std::vector<RayState> trace_manhattan_path(const ManhattanField& field, RayState start,
                                           int radius, std::uint64_t steps) {
  if (!field.admissible(start))
    throw InvalidParameter("trace_manhattan: start heading disagrees with the street orientation");
  return path_generic([&](Site s) { return field.state(s); }, start, radius, steps);
}

EstimateCI estimate_theta_manhattan(double q, int radius, std::uint64_t trials,
                                    const RngStream& base, unsigned workers, bool flip_rows,
                                    bool flip_columns) {
  if (trials == 0) throw InvalidParameter("estimate_theta_manhattan: trials must be >= 1");
  const auto budget = state_budget(radius);
  const auto hits = count_successes(trials, workers, [&](std::size_t i) {
    const ManhattanField field(q, radius, base.child(i), flip_rows, flip_columns);
    // Column 0 runs north unless flipped.
    const RayState start{{0, 0}, field.column_heading(0)};
    return trace_manhattan(field, start, radius, budget).kind == TraceKind::Escaped;
  });
  return estimate_proportion(hits, trials);
}

}  // namespace stochlab
