#include "stochlab/saw.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_set>

#include "stochlab/parallel.hpp"

namespace stochlab {

bool is_self_avoiding(const Walk& walk) {
  if (walk.sites.empty()) return false;
  std::unordered_set<Site, SiteHash> seen;
  for (std::size_t i = 0; i < walk.sites.size(); ++i) {
    if (!seen.insert(walk.sites[i]).second) return false;
    if (i > 0 && !adjacent(walk.kind, walk.sites[i - 1], walk.sites[i])) return false;
  }
  return true;
}

namespace {

// Depth-first enumerator on a square grid large enough that no walk of the
// requested length reaches its border. The side is odd, so the parity of a
// cell index equals the parity of x + y (needed for hexagonal neighbours).
class GridEnumerator {
 public:
  GridEnumerator(LatticeKind kind, int n)
      : kind_(kind),
        n_(n),
        side_(2 * n + 3),
        off_(n + 1),
        occupied_(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_), 0),
        counts_(static_cast<std::size_t>(n) + 1, 0) {}

  int index(Site s) const noexcept { return (s.x + off_) * side_ + (s.y + off_); }

  void occupy(Site s) { occupied_[static_cast<std::size_t>(index(s))] = 1; }

  // Counts every walk extending the occupied prefix that ends at `s` after
  // `depth` steps.
  void extend(Site s, int depth) { dfs(index(s), depth); }

  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

 private:
  void dfs(int idx, int depth) {
    ++counts_[static_cast<std::size_t>(depth)];
    if (depth == n_) return;
    if (kind_ == LatticeKind::Square) {
      const int nbr[4] = {idx + 1, idx - 1, idx + side_, idx - side_};
      for (int next : nbr) visit(next, depth);
    } else {
      const int third = (idx & 1) == 0 ? idx + 1 : idx - 1;
      const int nbr[3] = {idx + side_, idx - side_, third};
      for (int next : nbr) visit(next, depth);
    }
  }

  void visit(int next, int depth) {
    auto& cell = occupied_[static_cast<std::size_t>(next)];
    if (cell) return;
    cell = 1;
    dfs(next, depth + 1);
    cell = 0;
  }

  LatticeKind kind_;
  int n_;
  int side_;
  int off_;
  std::vector<std::uint8_t> occupied_;
  std::vector<std::uint64_t> counts_;
};

void check_ceiling(LatticeKind kind, int n, const EnumerationLimits& limits) {
  if (n < 0) throw InvalidParameter("count_saws: n must be >= 0");
  const int ceiling = kind == LatticeKind::Square ? limits.max_square : limits.max_hex;
  if (n > ceiling)
    throw ResourceLimit("count_saws: n = " + std::to_string(n) +
                        " exceeds the configured enumeration ceiling " +
                        std::to_string(ceiling));
}

// Square lattice, one-eighth reduction: the first step is E, and a walk that
// turns does so first towards N. Work item s counts walks E^s N ...
std::vector<std::uint64_t> enumerate_square(int n, unsigned workers) {
  std::vector<std::uint64_t> turned(static_cast<std::size_t>(n) + 1, 0);
  if (n < 2) return turned;
  std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n - 1), workers, [&](std::size_t item) {
    const int s = static_cast<int>(item) + 1;
    GridEnumerator e(LatticeKind::Square, n);
    for (int x = 0; x <= s; ++x) e.occupy({x, 0});
    e.occupy({s, 1});
    e.extend({s, 1}, s + 1);
    partial[item] = e.counts();
  });
  for (const auto& counts : partial)
    for (std::size_t k = 0; k < counts.size(); ++k) turned[k] += counts[k];
  return turned;
}

// Hexagonal lattice: one work item per two-step prefix from the origin.
std::vector<std::uint64_t> enumerate_hex(int n, unsigned workers) {
  std::vector<std::uint64_t> total(static_cast<std::size_t>(n) + 1, 0);
  total[0] = 1;
  if (n == 0) return total;
  std::vector<std::pair<Site, Site>> prefixes;
  for (Site a : hex_neighbors({0, 0}))
    for (Site b : hex_neighbors(a))
      if (b != Site{0, 0}) prefixes.emplace_back(a, b);
  total[1] = 3;
  if (n == 1) return total;
  std::vector<std::vector<std::uint64_t>> partial(prefixes.size());
  parallel_for(prefixes.size(), workers, [&](std::size_t i) {
    GridEnumerator e(LatticeKind::Hex, n);
    e.occupy({0, 0});
    e.occupy(prefixes[i].first);
    e.occupy(prefixes[i].second);
    e.extend(prefixes[i].second, 2);
    partial[i] = e.counts();
  });
  for (const auto& counts : partial)
    for (std::size_t k = 2; k < counts.size(); ++k) total[k] += counts[k];
  return total;
}

}  // namespace

std::vector<SawCount> count_saws_upto(LatticeKind kind, int n, const EnumerationLimits& limits) {
  check_ceiling(kind, n, limits);
  std::vector<SawCount> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  if (kind == LatticeKind::Square) {
    const auto turned = enumerate_square(n, limits.workers);
    for (int k = 0; k <= n; ++k) {
      BigInt sigma = k == 0 ? BigInt(1) : BigInt(4) * (1 + 2 * BigInt(turned[static_cast<std::size_t>(k)]));
      out.push_back(SawCount{kind, {0, 0}, k, sigma});
    }
  } else {
    const auto total = enumerate_hex(n, limits.workers);
    for (int k = 0; k <= n; ++k)
      out.push_back(SawCount{kind, {0, 0}, k, BigInt(total[static_cast<std::size_t>(k)])});
  }
  return out;
}

SawCount count_saws(LatticeKind kind, int n, const EnumerationLimits& limits) {
  return count_saws_upto(kind, n, limits).back();
}

SawCount count_saws_on_cluster(const BondConfig& config, Site v, int n) {
  if (n < 0) throw InvalidParameter("count_saws_on_cluster: n must be >= 0");
  if (!in_box(v, config.radius()))
    throw InvalidParameter("count_saws_on_cluster: start outside box");
  if (sup_norm(v) + n > config.radius())
    throw InvalidParameter("count_saws_on_cluster: n exceeds the box margin around v");

  std::vector<std::uint8_t> seen(box_sites(config.radius()), 0);
  std::uint64_t count = 0;
  const auto kind = config.kind();
  auto dfs = [&](auto&& self, Site s, int depth) -> void {
    if (depth == n) {
      ++count;
      return;
    }
    for (Site next : neighbors(kind, s)) {
      auto& flag = seen[box_index(next, config.radius())];
      if (flag || !config.is_open(s, next)) continue;
      flag = 1;
      self(self, next, depth + 1);
      flag = 0;
    }
  };
  seen[box_index(v, config.radius())] = 1;
  dfs(dfs, v, 0);
  return SawCount{kind, v, n, BigInt(count)};
}

// ---------------------------------------------------------------------------

std::pair<BigInt, BigInt> one_plus_sqrt2_power(int n) {
  BigInt a = 1, b = 0;
  for (int i = 0; i < n; ++i) {
    // (a + b sqrt2)(1 + sqrt2) = (a + 2b) + (a + b) sqrt2
    BigInt na = a + 2 * b;
    BigInt nb = a + b;
    a = std::move(na);
    b = std::move(nb);
  }
  return {a, b};
}

bool meets_hex_fekete_bound(const BigInt& sigma, int n) {
  const auto [a, b] = one_plus_sqrt2_power(n);
  // sigma^2 >= a + b sqrt2  <=>  d := sigma^2 - a >= 0 and d^2 >= 2 b^2 (b >= 0)
  const BigInt d = sigma * sigma - a;
  if (d < 0) return false;
  return d * d >= 2 * b * b;
}

bool root_greater(const BigInt& a, int m, const BigInt& b, int n) {
  return boost::multiprecision::pow(a, static_cast<unsigned>(n)) >
         boost::multiprecision::pow(b, static_cast<unsigned>(m));
}

ConnectiveEstimate connective_estimates(std::span<const SawCount> counts,
                                        std::optional<double> kappa, int fit_from) {
  std::vector<const SawCount*> used;
  for (const auto& c : counts)
    if (c.n >= 1) used.push_back(&c);
  if (used.empty()) throw InvalidParameter("connective_estimates: no counts with n >= 1");
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (used[i]->n != static_cast<int>(i) + 1)
      throw InvalidParameter("connective_estimates: counts must be consecutive from n = 1");
    if (used[i]->kind != used.front()->kind)
      throw InvalidParameter("connective_estimates: mixed lattices");
  }

  ConnectiveEstimate est;
  est.kind = used.front()->kind;
  for (const auto* c : used) {
    est.n.push_back(c->n);
    est.root.push_back(std::exp(std::log(c->sigma.convert_to<double>()) / c->n));
  }
  if (est.kind == LatticeKind::Hex) {
    est.fekete_bound_holds = true;
    for (const auto* c : used) {
      if (!meets_hex_fekete_bound(c->sigma, c->n)) {
        est.fekete_bound_holds = false;
        est.first_bound_violation = c->n;
        break;
      }
    }
  }

  std::vector<const SawCount*> fit_pts;
  for (const auto* c : used)
    if (c->n >= fit_from) fit_pts.push_back(c);
  const std::size_t params = kappa ? 2 : 3;
  if (fit_pts.size() >= params + 1) {
    const auto rows = static_cast<Eigen::Index>(fit_pts.size());
    Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(params));
    Eigen::VectorXd target(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double n = fit_pts[static_cast<std::size_t>(i)]->n;
      const double log_sigma = std::log(fit_pts[static_cast<std::size_t>(i)]->sigma.convert_to<double>());
      design(i, 0) = 1.0;
      design(i, 1) = std::log(n);
      if (kappa) {
        target(i) = log_sigma - n * std::log(*kappa);
      } else {
        design(i, 2) = n;
        target(i) = log_sigma;
      }
    }
    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
    const Eigen::VectorXd resid = target - design * beta;
    PowerLawFit fit;
    fit.amplitude = std::exp(beta(0));
    fit.gamma = beta(1) + 1.0;
    fit.kappa = kappa ? *kappa : std::exp(beta(2));
    fit.kappa_fitted = !kappa;
    fit.residuals.assign(resid.data(), resid.data() + resid.size());
    est.fit = fit;
  }
  return est;
}

// ---------------------------------------------------------------------------

namespace {

// Neighbour order used by the 2-bit walk codes.
Site nth_neighbor(LatticeKind kind, Site s, int k) {
  if (kind == LatticeKind::Square) return step(s, static_cast<Heading>(k));
  return hex_neighbors(s)[static_cast<std::size_t>(k)];
}

}  // namespace

ExactSawSampler::ExactSawSampler(LatticeKind kind, int n, std::uint64_t max_walks)
    : kind_(kind), n_(n) {
  if (n < 1 || n > 31) throw InvalidParameter("ExactSawSampler: n must lie in [1, 31]");
  const int degree = coordination(kind);
  std::unordered_set<Site, SiteHash> on_path{{0, 0}};
  auto dfs = [&](auto&& self, Site s, int depth, std::uint64_t code) -> void {
    if (depth == n) {
      if (codes_.size() >= max_walks)
        throw ResourceLimit("ExactSawSampler: sigma_n exceeds the walk-list ceiling");
      codes_.push_back(code);
      return;
    }
    for (int k = 0; k < degree; ++k) {
      const Site next = nth_neighbor(kind, s, k);
      if (!on_path.insert(next).second) continue;
      self(self, next, depth + 1, code | (static_cast<std::uint64_t>(k) << (2 * depth)));
      on_path.erase(next);
    }
  };
  dfs(dfs, {0, 0}, 0, 0);
}

Walk ExactSawSampler::walk(std::uint64_t index) const {
  Walk w{kind_, {{0, 0}}};
  const std::uint64_t code = codes_.at(index);
  for (int i = 0; i < n_; ++i)
    w.sites.push_back(nth_neighbor(kind_, w.sites.back(), static_cast<int>((code >> (2 * i)) & 3)));
  return w;
}

Walk ExactSawSampler::sample(RngStream& stream) const {
  std::uniform_int_distribution<std::uint64_t> pick(0, codes_.size() - 1);
  return walk(pick(stream));
}

// ---------------------------------------------------------------------------
// Pivot algorithm. Square walks are pivoted in site coordinates under the
// dihedral group of order 8. Hexagonal walks use u = (x, 3y - [x+y odd]),
// in which the honeycomb embeds as (u1 sqrt3/2, u2/2) and the six point
// symmetries fixing a vertex are integer maps.

namespace {

using Vec = std::array<int, 2>;

Vec square_op(int g, Vec v) {
  const int a = v[0], b = v[1];
  switch (g) {
    case 0: return {a, b};
    case 1: return {-b, a};
    case 2: return {-a, -b};
    case 3: return {b, -a};
    case 4: return {a, -b};
    case 5: return {-a, b};
    case 6: return {b, a};
    default: return {-b, -a};
  }
}

Vec hex_rotate(Vec v) { return {(-v[0] - v[1]) / 2, (3 * v[0] - v[1]) / 2}; }

Vec hex_op(int g, Vec v) {
  for (int i = 0; i < g % 3; ++i) v = hex_rotate(v);
  if (g >= 3) v[0] = -v[0];
  return v;
}

Vec to_internal(LatticeKind kind, Site s) {
  if (kind == LatticeKind::Square) return {s.x, s.y};
  return {s.x, 3 * s.y - (hex_points_up(s) ? 0 : 1)};
}

Site from_internal(LatticeKind kind, Vec v) {
  if (kind == LatticeKind::Square) return {v[0], v[1]};
  const int r = ((v[1] % 3) + 3) % 3;
  const int y = r == 0 ? v[1] / 3 : (v[1] + 1) / 3;
  return {v[0], y};
}

}  // namespace

Walk sample_pivot_saw(LatticeKind kind, int n, RngStream& stream, const PivotOptions& options,
                      PivotStats* stats) {
  if (n < 1) throw InvalidParameter("sample_pivot_saw: n must be >= 1");
  const int group = kind == LatticeKind::Square ? 8 : 6;
  auto apply = [&](int g, Vec v) { return kind == LatticeKind::Square ? square_op(g, v) : hex_op(g, v); };

  std::uniform_int_distribution<int> pick_group(0, group - 1);
  std::uniform_int_distribution<int> pick_nontrivial(1, group - 1);
  std::uniform_int_distribution<int> pick_pivot(0, n - 1);

  std::vector<Vec> pos(static_cast<std::size_t>(n) + 1);
  const int g0 = pick_group(stream);
  for (int i = 0; i <= n; ++i) pos[static_cast<std::size_t>(i)] = apply(g0, to_internal(kind, {i, 0}));

  // Occupancy stamps on a grid covering every reachable internal coordinate.
  const int w0 = 2 * n + 1;
  const int w1 = kind == LatticeKind::Square ? 2 * n + 1 : 6 * n + 3;
  const int o0 = n, o1 = kind == LatticeKind::Square ? n : 3 * n + 1;
  std::vector<std::uint32_t> stamp(static_cast<std::size_t>(w0) * static_cast<std::size_t>(w1), 0);
  std::uint32_t epoch = 0;
  auto cell = [&](Vec v) -> std::uint32_t& {
    return stamp[static_cast<std::size_t>(v[0] + o0) * static_cast<std::size_t>(w1) +
                 static_cast<std::size_t>(v[1] + o1)];
  };

  const std::uint64_t attempts = options.burn_in.value_or(10ULL * static_cast<std::uint64_t>(n));
  std::vector<Vec> tail;
  for (std::uint64_t t = 0; t < attempts; ++t) {
    const int k = pick_pivot(stream);
    const int g = pick_nontrivial(stream);
    ++epoch;
    for (int i = 0; i <= k; ++i) cell(pos[static_cast<std::size_t>(i)]) = epoch;
    const Vec centre = pos[static_cast<std::size_t>(k)];
    tail.clear();
    bool ok = true;
    for (int i = k + 1; i <= n && ok; ++i) {
      const Vec rel{pos[static_cast<std::size_t>(i)][0] - centre[0],
                    pos[static_cast<std::size_t>(i)][1] - centre[1]};
      const Vec r = apply(g, rel);
      const Vec np{centre[0] + r[0], centre[1] + r[1]};
      if (cell(np) == epoch) ok = false;
      tail.push_back(np);
    }
    if (stats) ++stats->attempted;
    if (!ok) continue;
    if (stats) ++stats->accepted;
    std::copy(tail.begin(), tail.end(), pos.begin() + k + 1);
  }

  Walk w{kind, {}};
  w.sites.reserve(pos.size());
  for (const Vec& v : pos) w.sites.push_back(from_internal(kind, v));
  return w;
}

namespace {

std::shared_ptr<const ExactSawSampler> cached_exact_sampler(LatticeKind kind, int n) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ExactSawSampler>> cache;
  constexpr std::uint64_t kMaxWalks = 10'000'000;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(static_cast<int>(kind), n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::shared_ptr<const ExactSawSampler> sampler;
  if (n <= 31) {
    const int ceiling = kind == LatticeKind::Square ? 16 : 26;
    if (n <= ceiling && count_saws(kind, n).sigma <= kMaxWalks)
      sampler = std::make_shared<ExactSawSampler>(kind, n, kMaxWalks);
  }
  cache.emplace(key, sampler);
  return sampler;
}

}  // namespace

Walk sample_uniform_saw(LatticeKind kind, int n, RngStream& stream) {
  if (n < 1) throw InvalidParameter("sample_uniform_saw: n must be >= 1");
  if (auto exact = cached_exact_sampler(kind, n)) return exact->sample(stream);
  return sample_pivot_saw(kind, n, stream);
}

std::pair<double, double> embed(LatticeKind kind, Site s) noexcept {
  if (kind == LatticeKind::Square) return {double(s.x), double(s.y)};
  return {s.x * std::sqrt(3.0) / 2.0, 1.5 * s.y - (hex_points_up(s) ? 0.0 : 0.5)};
}

std::size_t export_rescaled_walks(std::span<const Walk> samples, std::ostream& out) {
  if (samples.empty()) throw InvalidParameter("export_rescaled_walks: no samples");
  out << "walk,step,x,y\n";
  out.precision(17);
  std::size_t rows = 0;
  for (std::size_t w = 0; w < samples.size(); ++w) {
    const auto& walk = samples[w];
    const double scale = walk.length() > 0 ? std::pow(double(walk.length()), -0.75) : 1.0;
    for (std::size_t i = 0; i < walk.sites.size(); ++i) {
      const auto [x, y] = embed(walk.kind, walk.sites[i]);
      out << w << ',' << i << ',' << x * scale << ',' << y * scale << '\n';
      ++rows;
    }
  }
  return rows;
}

}  // namespace stochlab
