#include "stochlab/oriented.hpp"

#include <algorithm>
#include <cmath>

#include "stochlab/parallel.hpp"

namespace stochlab {

OrientedConfig::OrientedConfig(int radius, double p, std::uint64_t seed, std::uint64_t stream_id,
                               double enhance)
    : radius_(radius), p_(p), enhance_(enhance), key_(hash_words(seed, stream_id, 0x6f7269ULL)) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("oriented: p must lie in [0,1]");
  if (!(enhance >= 0.0 && enhance <= 1.0)) throw InvalidParameter("oriented: enhancement must lie in [0,1]");
  if (radius < 1) throw InvalidParameter("oriented: radius must be >= 1");
}

std::uint64_t OrientedConfig::edge_key(Edge e) noexcept {
  return (std::uint64_t{static_cast<std::uint32_t>(e.base.x)} << 32) ^
         (std::uint64_t{static_cast<std::uint32_t>(e.base.y)} << 1) ^ (e.vertical ? 1u : 0u);
}

bool OrientedConfig::forward(Edge e) const noexcept {
  if (!forward_override_.empty()) {
    const auto it = forward_override_.find(edge_key(e));
    if (it != forward_override_.end()) return it->second;
  }
  return to_unit(hash_words(key_, static_cast<std::uint32_t>(e.base.x),
                            static_cast<std::uint32_t>(e.base.y), e.vertical ? 1u : 0u)) < p_;
}

bool OrientedConfig::enhanced(Edge e) const noexcept {
  if (!enhance_override_.empty()) {
    const auto it = enhance_override_.find(edge_key(e));
    if (it != enhance_override_.end()) return it->second;
  }
  if (enhance_ <= 0.0) return false;
  return to_unit(hash_words(key_, static_cast<std::uint32_t>(e.base.x),
                            static_cast<std::uint32_t>(e.base.y), e.vertical ? 3u : 2u)) < enhance_;
}

bool OrientedConfig::traversable(Site s, Heading h) const noexcept {
  switch (h) {
    case Heading::E: {
      const Edge e{s, false};
      return forward(e) || enhanced(e);
    }
    case Heading::N: {
      const Edge e{s, true};
      return forward(e) || enhanced(e);
    }
    case Heading::W: return !forward(Edge{{s.x - 1, s.y}, false});
    default: return !forward(Edge{{s.x, s.y - 1}, true});
  }
}

void OrientedConfig::set_forward(Edge e, bool f) { forward_override_[edge_key(e)] = f; }
void OrientedConfig::set_enhanced(Edge e, bool f) { enhance_override_[edge_key(e)] = f; }

namespace {

// Per-thread visited marks, cleared by bumping a generation counter.
struct VisitMarks {
  std::vector<std::uint32_t> mark;
  std::uint32_t generation = 0;

  void reset(std::size_t size) {
    if (mark.size() != size || generation == UINT32_MAX) {
      mark.assign(size, 0);
      generation = 0;
    }
    ++generation;
  }
  bool visit(std::size_t i) {
    if (mark[i] == generation) return false;
    mark[i] = generation;
    return true;
  }
};

VisitMarks& thread_marks() {
  thread_local VisitMarks marks;
  return marks;
}

}  // namespace

ReachResult reachable_from_origin(const OrientedConfig& config) {
  const int L = config.radius();
  auto& marks = thread_marks();
  marks.reset(box_sites(L));
  ReachResult r;
  std::vector<Site> layer{{0, 0}}, next;
  marks.visit(box_index({0, 0}, L));
  while (!layer.empty()) {
    r.frontier_sizes.push_back(layer.size());
    next.clear();
    for (const Site s : layer) {
      r.reached.push_back(s);
      if (sup_norm(s) == L) {
        r.touched_boundary = true;
        continue;  // edges leaving the box are not followed
      }
      for (const Heading h : kHeadings) {
        if (!config.traversable(s, h)) continue;
        const Site t = step(s, h);
        if (marks.visit(box_index(t, L))) next.push_back(t);
      }
    }
    std::swap(layer, next);
  }
  std::sort(r.reached.begin(), r.reached.end());
  return r;
}

bool touches_boundary(const OrientedConfig& config) {
  const int L = config.radius();
  auto& marks = thread_marks();
  marks.reset(box_sites(L));
  // Pushed in reverse so that the likelier outward headings are explored first.
  const bool forward_likely = config.density() >= 0.5;
  const Heading order[4] = {forward_likely ? Heading::S : Heading::N,
                            forward_likely ? Heading::W : Heading::E,
                            forward_likely ? Heading::N : Heading::S,
                            forward_likely ? Heading::E : Heading::W};
  std::vector<Site> stack{{0, 0}};
  marks.visit(box_index({0, 0}, L));
  while (!stack.empty()) {
    const Site s = stack.back();
    stack.pop_back();
    if (sup_norm(s) == L) return true;
    for (const Heading h : order) {
      if (!config.traversable(s, h)) continue;
      const Site t = step(s, h);
      if (marks.visit(box_index(t, L))) stack.push_back(t);
    }
  }
  return false;
}

EstimateCI estimate_theta_oriented(double p, int radius, std::uint64_t trials,
                                   const RngStream& base, unsigned workers, double enhance) {
  if (trials == 0) throw InvalidParameter("estimate_theta_oriented: trials must be >= 1");
  const auto hits = count_successes(trials, workers, [&](std::size_t i) {
    return touches_boundary(OrientedConfig(radius, p, base.child(i), enhance));
  });
  return estimate_proportion(hits, trials);
}

SymmetryReport symmetry_report(double p, int radius, std::uint64_t trials, const RngStream& base,
                               unsigned workers) {
  SymmetryReport r;
  r.at_p = estimate_theta_oriented(p, radius, trials, base.child(0), workers);
  r.at_complement = estimate_theta_oriented(1.0 - p, radius, trials, base.child(1), workers);
  r.distance = pooled_se_distance(r.at_p, r.at_complement);
  return r;
}

}  // namespace stochlab
