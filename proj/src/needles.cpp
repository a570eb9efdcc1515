#include "stochlab/needles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "stochlab/parallel.hpp"
#include "stochlab/simd/kernels.hpp"

namespace stochlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InvalidParameter("angle law: not a number: '" + s + "'");
  }
  if (pos != s.size()) throw InvalidParameter("angle law: not a number: '" + s + "'");
  return v;
}

}  // namespace

AngleLaw::AngleLaw(std::variant<Degenerate, DiscreteRational, Uniform, Table> v)
    : law_(std::move(v)) {
  validate();
  if (const auto* r = std::get_if<DiscreteRational>(&law_)) {
    double acc = 0.0;
    for (const auto& a : r->atoms) {
      acc += a.weight;
      cumulative_.emplace_back(kPi * double(a.numerator) / double(a.denominator), acc);
    }
  } else if (const auto* t = std::get_if<Table>(&law_)) {
    double acc = 0.0;
    for (const auto& [angle, w] : t->atoms) {
      acc += w;
      cumulative_.emplace_back(angle, acc);
    }
  }
}

AngleLaw AngleLaw::degenerate(double angle) { return AngleLaw(Degenerate{angle}); }
AngleLaw AngleLaw::uniform() { return AngleLaw(Uniform{}); }
AngleLaw AngleLaw::rational(std::vector<RationalAtom> atoms) {
  return AngleLaw(DiscreteRational{std::move(atoms)});
}
AngleLaw AngleLaw::table(std::vector<std::pair<double, double>> atoms) {
  return AngleLaw(Table{std::move(atoms)});
}

void AngleLaw::validate() const {
  auto check_angle = [](double a) {
    if (!(a >= 0.0 && a < kPi)) throw InvalidParameter("angle law: angles must lie in [0, pi)");
  };
  auto check_weights = [](double total, std::size_t n) {
    if (n == 0) throw InvalidParameter("angle law: no atoms");
    if (std::abs(total - 1.0) > 1e-9) throw InvalidParameter("angle law: weights must sum to 1");
  };
  if (const auto* d = std::get_if<Degenerate>(&law_)) {
    check_angle(d->angle);
  } else if (const auto* r = std::get_if<DiscreteRational>(&law_)) {
    double total = 0.0;
    for (const auto& a : r->atoms) {
      if (a.denominator <= 0 || a.numerator < 0 || a.numerator >= a.denominator)
        throw InvalidParameter("angle law: rational angles must be p/q * pi with 0 <= p/q < 1");
      if (!(a.weight > 0.0)) throw InvalidParameter("angle law: weights must be positive");
      total += a.weight;
    }
    check_weights(total, r->atoms.size());
  } else if (const auto* t = std::get_if<Table>(&law_)) {
    double total = 0.0;
    for (const auto& [angle, w] : t->atoms) {
      check_angle(angle);
      if (!(w > 0.0)) throw InvalidParameter("angle law: weights must be positive");
      total += w;
    }
    check_weights(total, t->atoms.size());
  }
}

AngleLaw AngleLaw::parse(const std::string& text) {
  if (text == "uniform") return uniform();
  const auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "degenerate") return degenerate(parse_double(parts[1]));
  if (parts.size() == 3 && (parts[0] == "atoms" || parts[0] == "table")) {
    const auto angles = split(parts[1], ',');
    const auto weights = split(parts[2], ',');
    if (angles.size() != weights.size())
      throw InvalidParameter("angle law: angle and weight lists differ in length");
    if (parts[0] == "table") {
      std::vector<std::pair<double, double>> atoms;
      for (std::size_t i = 0; i < angles.size(); ++i)
        atoms.emplace_back(parse_double(angles[i]), parse_double(weights[i]));
      return table(std::move(atoms));
    }
    std::vector<RationalAtom> atoms;
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const auto frac = split(angles[i], '/');
      if (frac.size() != 2) throw InvalidParameter("angle law: expected P/Q, got '" + angles[i] + "'");
      try {
        atoms.push_back({std::stol(frac[0]), std::stol(frac[1]), parse_double(weights[i])});
      } catch (const std::logic_error&) {
        throw InvalidParameter("angle law: bad rational '" + angles[i] + "'");
      }
    }
    return rational(std::move(atoms));
  }
  throw InvalidParameter("angle law: cannot parse '" + text + "'");
}

double AngleLaw::sample(double u) const {
  if (const auto* d = std::get_if<Degenerate>(&law_)) return d->angle;
  if (std::holds_alternative<Uniform>(law_)) return kPi * u;
  for (const auto& [angle, cdf] : cumulative_)
    if (u < cdf) return angle;
  return cumulative_.back().first;
}

bool AngleLaw::is_degenerate() const noexcept {
  if (std::holds_alternative<Degenerate>(law_)) return true;
  return cumulative_.size() == 1;
}

std::string AngleLaw::describe() const {
  std::ostringstream out;
  if (const auto* d = std::get_if<Degenerate>(&law_)) {
    out << "degenerate:" << d->angle;
  } else if (std::holds_alternative<Uniform>(law_)) {
    out << "uniform";
  } else if (const auto* r = std::get_if<DiscreteRational>(&law_)) {
    out << "atoms:";
    for (std::size_t i = 0; i < r->atoms.size(); ++i)
      out << (i ? "," : "") << r->atoms[i].numerator << '/' << r->atoms[i].denominator;
    out << ':';
    for (std::size_t i = 0; i < r->atoms.size(); ++i) out << (i ? "," : "") << r->atoms[i].weight;
  } else if (const auto* t = std::get_if<Table>(&law_)) {
    out << "table:";
    for (std::size_t i = 0; i < t->atoms.size(); ++i) out << (i ? "," : "") << t->atoms[i].first;
    out << ':';
    for (std::size_t i = 0; i < t->atoms.size(); ++i) out << (i ? "," : "") << t->atoms[i].second;
  }
  return out.str();
}

// ---------------------------------------------------------------------------

Point Needle::endpoint_a() const noexcept {
  return {centre.x - 0.5 * length * std::cos(angle), centre.y - 0.5 * length * std::sin(angle)};
}

Point Needle::endpoint_b() const noexcept {
  return {centre.x + 0.5 * length * std::cos(angle), centre.y + 0.5 * length * std::sin(angle)};
}

NeedleField::NeedleField(std::uint64_t seed, int window_radius, double epsilon, AngleLaw law)
    : epsilon_(epsilon), window_(window_radius), law_(std::move(law)) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidParameter("needle field: epsilon must be positive");
  if (window_radius < 1) throw InvalidParameter("needle field: window radius must be >= 1");
  bucket_ = std::max(2, static_cast<int>(std::ceil(epsilon / 2.0)));
  nb_ = (2 * window_ + bucket_ - 1) / bucket_;
  for (std::uint64_t attempt = 0;; ++attempt) {
    generate(hash_words(seed, attempt, 0x6e656564ULL));
    if (!origin_on_a_needle()) break;
    ++rejections_;
  }
}

void NeedleField::generate(std::uint64_t key) {
  struct Raw {
    double x, y, angle;
    std::uint32_t bucket;
  };
  std::vector<Raw> raw;
  for (int i = -window_; i < window_; ++i) {
    for (int j = -window_; j < window_; ++j) {
      RngStream cell(key, hash_words(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
      const auto count = sample_poisson(cell, 1.0);
      const auto bi = static_cast<std::uint32_t>((i + window_) / bucket_);
      const auto bj = static_cast<std::uint32_t>((j + window_) / bucket_);
      for (std::uint64_t k = 0; k < count; ++k) {
        const double x = i + cell.uniform01();
        const double y = j + cell.uniform01();
        const double a = law_.sample(cell.uniform01());
        raw.push_back({x, y, a, bi * static_cast<std::uint32_t>(nb_) + bj});
      }
    }
  }
  std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.bucket < b.bucket; });
  const std::size_t n = raw.size();
  cx_.resize(n), cy_.resize(n), angle_.resize(n);
  ax_.resize(n), ay_.resize(n), ex_.resize(n), ey_.resize(n);
  bucket_start_.assign(static_cast<std::size_t>(nb_) * nb_ + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = raw[k];
    cx_[k] = r.x;
    cy_[k] = r.y;
    angle_[k] = r.angle;
    const double hx = 0.5 * epsilon_ * std::cos(r.angle);
    const double hy = 0.5 * epsilon_ * std::sin(r.angle);
    ax_[k] = r.x - hx;
    ay_[k] = r.y - hy;
    ex_[k] = 2.0 * hx;
    ey_[k] = 2.0 * hy;
    ++bucket_start_[r.bucket + 1];
  }
  std::partial_sum(bucket_start_.begin(), bucket_start_.end(), bucket_start_.begin());
}

bool NeedleField::origin_on_a_needle() const {
  for (std::size_t k = 0; k < cx_.size(); ++k) {
    // Distance from the origin to segment k.
    const double len2 = ex_[k] * ex_[k] + ey_[k] * ey_[k];
    double s = -(ax_[k] * ex_[k] + ay_[k] * ey_[k]) / len2;
    s = std::clamp(s, 0.0, 1.0);
    const double px = ax_[k] + s * ex_[k];
    const double py = ay_[k] + s * ey_[k];
    if (std::hypot(px, py) <= kGeometryTolerance) return true;
  }
  return false;
}

Needle NeedleField::needle(std::size_t i) const noexcept {
  return Needle{{cx_[i], cy_[i]}, angle_[i], epsilon_};
}

std::pair<std::uint32_t, std::uint32_t> NeedleField::bucket_range(int bi, int bj) const noexcept {
  if (bi < 0 || bj < 0 || bi >= nb_ || bj >= nb_) return {0, 0};
  const auto b = static_cast<std::size_t>(bi) * static_cast<std::size_t>(nb_) + static_cast<std::size_t>(bj);
  return {bucket_start_[b], bucket_start_[b + 1]};
}

NeedleField generate_field(std::uint64_t seed, int window_radius, double epsilon,
                           const AngleLaw& law) {
  return NeedleField(seed, window_radius, epsilon, law);
}

// ---------------------------------------------------------------------------

namespace {

struct HitSearch {
  const NeedleField& field;
  Point from;
  Point dir;
  double max_range;
  std::optional<std::uint32_t> exclude;

  double best_t = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  std::uint32_t best = 0;
  bool found = false;
  bool crossing = false;  // another candidate within tolerance of best_t
  std::vector<double> t_buf, s_buf;

  void scan(std::uint32_t first, std::uint32_t last) {
    if (first >= last) return;
    const std::size_t n = last - first;
    t_buf.resize(n);
    s_buf.resize(n);
    const simd::SegmentSoA segs{field.ax().subspan(first, n), field.ay().subspan(first, n),
                                field.ex().subspan(first, n), field.ey().subspan(first, n)};
    simd::ray_segment_params(from.x, from.y, dir.x, dir.y, segs, t_buf, s_buf);
    const double s_tol = kGeometryTolerance / field.epsilon();
    for (std::size_t k = 0; k < n; ++k) {
      const auto id = static_cast<std::uint32_t>(first + k);
      if (exclude && *exclude == id) continue;
      const double t = t_buf[k];
      const double s = s_buf[k];
      if (!(t > 0.0) || t > max_range || !(s >= -s_tol && s <= 1.0 + s_tol)) continue;
      if (!found || t < best_t) {
        crossing = found && best_t - t <= kGeometryTolerance;
        best_t = t;
        best_s = s;
        best = id;
        found = true;
      } else if (t - best_t <= kGeometryTolerance) {
        crossing = true;
      }
    }
  }
};

}  // namespace

FirstHit first_hit(const NeedleField& field, Point from, Point direction, double max_range,
                   std::optional<std::uint32_t> exclude) {
  const double norm = std::hypot(direction.x, direction.y);
  if (std::abs(norm - 1.0) > 1e-9) throw InvalidParameter("first_hit: direction must be a unit vector");

  HitSearch search{field, from, direction, max_range, exclude, {}, {}, {}, {}, {}, {}, {}};
  const int b = field.bucket_side();
  const int nb = field.buckets_per_side();
  const double w = field.window_radius();
  // Bucket coordinates: u = (x + W) / b.
  const double ux = (from.x + w) / b;
  const double uy = (from.y + w) / b;
  int bi = static_cast<int>(std::floor(ux));
  int bj = static_cast<int>(std::floor(uy));
  const int step_i = direction.x > 0 ? 1 : -1;
  const int step_j = direction.y > 0 ? 1 : -1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Ray parameter (in world units) to the next bucket boundary and per bucket.
  double t_next_i = direction.x == 0.0 ? inf
                    : ((direction.x > 0 ? (bi + 1 - ux) : (ux - bi)) * b) / std::abs(direction.x);
  double t_next_j = direction.y == 0.0 ? inf
                    : ((direction.y > 0 ? (bj + 1 - uy) : (uy - bj)) * b) / std::abs(direction.y);
  const double dt_i = direction.x == 0.0 ? inf : b / std::abs(direction.x);
  const double dt_j = direction.y == 0.0 ? inf : b / std::abs(direction.y);

  std::vector<std::pair<int, int>> done;  // buckets already scanned
  auto scanned = [&](int i, int j) {
    return std::find(done.begin(), done.end(), std::make_pair(i, j)) != done.end();
  };

  for (;;) {
    // Scan the 3x3 block around the current bucket, one column run at a time.
    for (int i = bi - 1; i <= bi + 1; ++i) {
      int j = bj - 1;
      while (j <= bj + 1) {
        if (scanned(i, j)) {
          ++j;
          continue;
        }
        const int j0 = j;
        while (j <= bj + 1 && !scanned(i, j)) done.emplace_back(i, j++);
        if (i < 0 || i >= nb) continue;
        const int lo = std::max(j0, 0), hi = std::min(j - 1, nb - 1);
        if (lo > hi) continue;
        search.scan(field.bucket_range(i, lo).first, field.bucket_range(i, hi).second);
      }
    }
    const double t_exit = std::min(t_next_i, t_next_j);
    if (search.found && search.best_t <= t_exit) break;
    if (t_exit > max_range) break;
    // Past the stored window in the direction of travel: nothing left.
    if ((step_i > 0 ? bi > nb : bi < -1) || (step_j > 0 ? bj > nb : bj < -1)) break;
    if (t_next_i < t_next_j) {
      bi += step_i;
      t_next_i += dt_i;
    } else {
      bj += step_j;
      t_next_j += dt_j;
    }
    if (done.size() > 64) {
      // Keep only buckets that can still be revisited by the 3x3 block.
      std::erase_if(done, [&](const auto& c) {
        return std::abs(c.first - bi) > 2 || std::abs(c.second - bj) > 2;
      });
    }
  }

  FirstHit hit;
  if (!search.found) return hit;
  hit.needle = search.best;
  hit.distance = search.best_t;
  hit.point = {from.x + search.best_t * direction.x, from.y + search.best_t * direction.y};
  const double s_tol = kGeometryTolerance / field.epsilon();
  const bool near_end = search.best_s <= s_tol || search.best_s >= 1.0 - s_tol;
  hit.status = (near_end || search.crossing) ? HitStatus::Degenerate : HitStatus::Hit;
  return hit;
}

const char* to_string(ContinuumOutcome o) {
  switch (o) {
    case ContinuumOutcome::EscapedRadius: return "escaped";
    case ContinuumOutcome::BudgetExhausted: return "budget";
    default: return "degenerate";
  }
}

Point ContinuumTrace::position_at(double t) const {
  if (points.empty()) throw InvalidParameter("position_at: empty trace");
  double remaining = t;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double len = std::hypot(points[k].x - points[k - 1].x, points[k].y - points[k - 1].y);
    if (remaining <= len || k + 1 == points.size()) {
      const double f = len > 0.0 ? std::min(remaining / len, 1.0) : 0.0;
      return {points[k - 1].x + f * (points[k].x - points[k - 1].x),
              points[k - 1].y + f * (points[k].y - points[k - 1].y)};
    }
    remaining -= len;
  }
  return points.back();
}

ContinuumTrace trace_from(const NeedleField& field, Point from, Point direction, double R,
                          std::size_t max_reflections, std::optional<std::uint32_t> exclude) {
  if (R + 0.5 * field.epsilon() > field.window_radius())
    throw InvalidParameter("trace: escape radius plus half a needle exceeds the field window");
  ContinuumTrace trace;
  trace.alpha = std::atan2(direction.y, direction.x);
  trace.escape_radius = R;
  trace.points.push_back(from);
  Point p = from;
  Point d = direction;
  for (;;) {
    const double b = p.x * d.x + p.y * d.y;
    const double c = p.x * p.x + p.y * p.y - R * R;
    const double t_exit = -b + std::sqrt(std::max(0.0, b * b - c));
    const FirstHit hit = first_hit(field, p, d, t_exit, exclude);
    if (hit.status == HitStatus::None) {
      const Point end{p.x + t_exit * d.x, p.y + t_exit * d.y};
      trace.points.push_back(end);
      trace.total_length += t_exit;
      trace.outcome = ContinuumOutcome::EscapedRadius;
      return trace;
    }
    trace.points.push_back(hit.point);
    trace.total_length += hit.distance;
    if (hit.status == HitStatus::Degenerate) {
      trace.outcome = ContinuumOutcome::DegenerateHit;
      return trace;
    }
    if (trace.needles.size() == max_reflections) {
      trace.outcome = ContinuumOutcome::BudgetExhausted;
      return trace;
    }
    trace.needles.push_back(hit.needle);
    const double ang = field.needle(hit.needle).angle;
    const double ux = std::cos(ang), uy = std::sin(ang);
    const double proj = d.x * ux + d.y * uy;
    Point nd{2.0 * proj * ux - d.x, 2.0 * proj * uy - d.y};
    const double n = std::hypot(nd.x, nd.y);
    d = {nd.x / n, nd.y / n};
    p = hit.point;
    exclude = hit.needle;
  }
}

ContinuumTrace trace_continuum(const NeedleField& field, double alpha, double R,
                               std::size_t max_reflections) {
  ContinuumTrace t = trace_from(field, {0.0, 0.0}, {std::cos(alpha), std::sin(alpha)}, R,
                                max_reflections);
  t.alpha = alpha;
  return t;
}

EscapeSpectrum escape_spectrum(const NeedleField& field, std::span<const double> alpha_grid,
                               double R, std::size_t max_reflections) {
  if (alpha_grid.empty()) throw InvalidParameter("escape_spectrum: empty angle grid");
  EscapeSpectrum out;
  for (const double a : alpha_grid) {
    const auto t = trace_continuum(field, a, R, max_reflections);
    out.rows.push_back({a, t.outcome, t.reflections()});
    if (t.outcome == ContinuumOutcome::EscapedRadius) ++out.escaped;
    if (t.outcome == ContinuumOutcome::DegenerateHit) ++out.degenerate;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Segment {
  Point a, b;
  double minx, maxx, miny, maxy;
};

// Liang-Barsky clip of a + s (b - a) to [-h, h]^2.
std::optional<Segment> clip(Point a, Point b, double h) {
  double s0 = 0.0, s1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x + h, h - a.x, a.y + h, h - a.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return std::nullopt;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) s0 = std::max(s0, r);
    else s1 = std::min(s1, r);
  }
  if (s0 > s1) return std::nullopt;
  Segment s;
  s.a = {a.x + s0 * dx, a.y + s0 * dy};
  s.b = {a.x + s1 * dx, a.y + s1 * dy};
  s.minx = std::min(s.a.x, s.b.x);
  s.maxx = std::max(s.a.x, s.b.x);
  s.miny = std::min(s.a.y, s.b.y);
  s.maxy = std::max(s.a.y, s.b.y);
  return s;
}

double orient(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool on_segment(Point a, Point b, Point c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
         c.y <= std::max(a.y, b.y);
}

bool segments_meet(const Segment& s, const Segment& t) {
  if (s.maxx < t.minx || t.maxx < s.minx || s.maxy < t.miny || t.maxy < s.miny) return false;
  const double d1 = orient(t.a, t.b, s.a), d2 = orient(t.a, t.b, s.b);
  const double d3 = orient(s.a, s.b, t.a), d4 = orient(s.a, s.b, t.b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  return (d1 == 0 && on_segment(t.a, t.b, s.a)) || (d2 == 0 && on_segment(t.a, t.b, s.b)) ||
         (d3 == 0 && on_segment(s.a, s.b, t.a)) || (d4 == 0 && on_segment(s.a, s.b, t.b));
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

bool blocks_vertical_chain(const NeedleField& field, double side) {
  const double h = side / 2.0;
  std::vector<Segment> segs;
  for (std::size_t k = 0; k < field.size(); ++k) {
    const Needle n = field.needle(k);
    if (auto s = clip(n.endpoint_a(), n.endpoint_b(), h)) segs.push_back(*s);
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.minx < b.minx; });
  const auto top = static_cast<std::uint32_t>(segs.size());
  const auto bottom = top + 1;
  UnionFind uf(segs.size() + 2);
  for (std::uint32_t i = 0; i < segs.size(); ++i) {
    if (segs[i].maxy >= h) uf.unite(i, top);
    if (segs[i].miny <= -h) uf.unite(i, bottom);
    for (std::uint32_t j = i + 1; j < segs.size() && segs[j].minx <= segs[i].maxx; ++j)
      if (segments_meet(segs[i], segs[j])) uf.unite(i, j);
  }
  return uf.find(top) == uf.find(bottom);
}

NeedleField crossing_field(std::uint64_t seed, double side, double epsilon, const AngleLaw& law) {
  const int window = static_cast<int>(std::ceil(side / 2.0 + epsilon / 2.0)) + 1;
  return NeedleField(seed, window, epsilon, law);
}

EstimateCI vacant_crossing_probability(double epsilon, const AngleLaw& law, double side,
                                       std::uint64_t trials, const RngStream& base,
                                       unsigned workers) {
  if (!(side > 0.0)) throw InvalidParameter("vacant_crossing_probability: side must be positive");
  if (trials == 0) throw InvalidParameter("vacant_crossing_probability: trials must be >= 1");
  const auto hits = count_successes(trials, workers, [&](std::size_t i) {
    const auto field = crossing_field(base.child(i).key(), side, epsilon, law);
    return !blocks_vertical_chain(field, side);
  });
  return estimate_proportion(hits, trials);
}

// ---------------------------------------------------------------------------

DiffusivityReport estimate_diffusivity(std::span<const ContinuumTrace> traces,
                                       std::span<const double> t_grid) {
  std::vector<const ContinuumTrace*> escaping;
  for (const auto& t : traces)
    if (t.outcome == ContinuumOutcome::EscapedRadius) escaping.push_back(&t);
  if (escaping.empty()) throw InvalidParameter("estimate_diffusivity: no escaping traces");

  DiffusivityReport report;
  for (const double t : t_grid) {
    double sx = 0, sy = 0, sxx = 0, syy = 0;
    std::size_t n = 0;
    for (const auto* tr : escaping) {
      if (tr->total_length < t) continue;
      const Point p = tr->position_at(t);
      sx += p.x;
      sy += p.y;
      sxx += p.x * p.x;
      syy += p.y * p.y;
      ++n;
    }
    if (n < 2) continue;
    const double dn = double(n);
    const double var = (sxx - sx * sx / dn + syy - sy * sy / dn) / (dn - 1.0);
    report.rows.push_back({t, n, var});
  }
  if (report.rows.size() >= 2) {
    double num = 0, den = 0;
    double lx = 0, ly = 0, lxx = 0, lxy = 0;
    std::size_t m = 0;
    for (const auto& r : report.rows) {
      num += r.t * r.variance;
      den += r.t * r.t;
      if (r.t > 0 && r.variance > 0) {
        const double x = std::log(r.t), y = std::log(r.variance);
        lx += x, ly += y, lxx += x * x, lxy += x * y;
        ++m;
      }
    }
    report.sigma2 = num / den;
    if (m >= 2) {
      const double dm = double(m);
      report.exponent = (lxy - lx * ly / dm) / (lxx - lx * lx / dm);
      report.diffusive = std::abs(report.exponent - 1.0) <= 0.2;
    }
  }
  return report;
}

void write_trace_csv(std::span<const ContinuumTrace> traces, std::ostream& out) {
  out << "trace,alpha,point,x,y,outcome\n";
  out.precision(17);
  for (std::size_t i = 0; i < traces.size(); ++i)
    for (std::size_t k = 0; k < traces[i].points.size(); ++k)
      out << i << ',' << traces[i].alpha << ',' << k << ',' << traces[i].points[k].x << ','
          << traces[i].points[k].y << ',' << to_string(traces[i].outcome) << '\n';
}

}  // namespace stochlab
