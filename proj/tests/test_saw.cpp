#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "stochlab/saw.hpp"

using namespace stochlab;

namespace {

// Generate every sequence of neighbour choices, then keep the ones that
// never revisit a site. No pruning.
std::uint64_t naive_count(LatticeKind kind, int n) {
  const int z = coordination(kind);
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(z);
  std::uint64_t good = 0;
  std::vector<Site> path(static_cast<std::size_t>(n) + 1);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    path[0] = {0, 0};
    for (int i = 0; i < n; ++i) {
      path[i + 1] = neighbors(kind, path[i])[c % z];
      c /= z;
    }
    bool ok = true;
    for (int i = 0; i <= n && ok; ++i)
      for (int j = 0; j < i && ok; ++j) ok = !(path[i] == path[j]);
    good += ok;
  }
  return good;
}

std::uint64_t naive_cluster_count(const BondConfig& config, Site v, int n) {
  std::uint64_t good = 0;
  std::vector<Site> path{v};
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      std::set<Site> seen(path.begin(), path.end());
      good += seen.size() == path.size();
      return;
    }
    for (const Site t : neighbors(config.kind(), path.back())) {
      if (!config.is_open(path.back(), t)) continue;
      path.push_back(t);
      self(self, depth + 1);
      path.pop_back();
    }
  };
  rec(rec, 0);
  return good;
}

}  // namespace

TEST_CASE("exact counts match generate-and-filter") {
  for (int n = 0; n <= 9; ++n) CHECK(count_saws(LatticeKind::Square, n).sigma == naive_count(LatticeKind::Square, n));
  for (int n = 0; n <= 12; ++n) CHECK(count_saws(LatticeKind::Hex, n).sigma == naive_count(LatticeKind::Hex, n));
}

TEST_CASE("counts up to n agree with single counts and known values") {
  const auto sq = count_saws_upto(LatticeKind::Square, 12);
  const std::uint64_t known[] = {1, 4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100, 120292, 324932};
  for (int n = 0; n <= 12; ++n) {
    CHECK(sq[n].n == n);
    CHECK(sq[n].sigma == known[n]);
  }
  const auto hex = count_saws_upto(LatticeKind::Hex, 14);
  for (int n = 0; n <= 14; ++n) CHECK(hex[n].sigma == count_saws(LatticeKind::Hex, n).sigma);
  CHECK(hex[12].sigma == 4416);
}

TEST_CASE("submultiplicativity on both lattices") {
  for (const auto kind : {LatticeKind::Square, LatticeKind::Hex}) {
    const auto c = count_saws_upto(kind, 16);
    for (int m = 1; m <= 16; ++m)
      for (int n = 1; m + n <= 16; ++n) CHECK(c[m + n].sigma <= c[m].sigma * c[n].sigma);
  }
}

TEST_CASE("enumeration limits and bad arguments") {
  EnumerationLimits lim;
  lim.max_square = 5;
  CHECK_THROWS_AS(count_saws(LatticeKind::Square, 6, lim), ResourceLimit);
  CHECK_THROWS_AS(count_saws(LatticeKind::Square, -1), InvalidParameter);
}

TEST_CASE("counts on percolation clusters") {
  const BondConfig full(LatticeKind::Square, 8, 1.0, 0, 0);
  CHECK(count_saws_on_cluster(full, {0, 0}, 6).sigma == 780);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const auto kind : {LatticeKind::Square, LatticeKind::Hex}) {
      const BondConfig c(kind, 9, 0.7, seed, 2);
      CHECK(count_saws_on_cluster(c, {1, 0}, 7).sigma == naive_cluster_count(c, {1, 0}, 7));
    }
  }
  CHECK_THROWS_AS(count_saws_on_cluster(full, {5, 0}, 6), InvalidParameter);
}

TEST_CASE("exact Fekete test against high-precision floating point") {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const auto [a, b] = one_plus_sqrt2_power(2);
  CHECK(a == 3);
  CHECK(b == 2);
  const auto hex = count_saws_upto(LatticeKind::Hex, 20);
  const Big base = 1 + boost::multiprecision::sqrt(Big(2));
  for (int n = 1; n <= 20; ++n) {
    const Big lhs = Big(hex[n].sigma) * Big(hex[n].sigma);
    CHECK(meets_hex_fekete_bound(hex[n].sigma, n) == (lhs >= boost::multiprecision::pow(base, n)));
  }
  // 1^2 < 1 + sqrt 2.
  CHECK_FALSE(meets_hex_fekete_bound(1, 1));
  CHECK(root_greater(4, 1, 15, 2));
  CHECK_FALSE(root_greater(4, 1, 16, 2));
}

TEST_CASE("connective estimates") {
  const auto hex = count_saws_upto(LatticeKind::Hex, 20);
  const double kappa = std::sqrt(2 + std::sqrt(2.0));
  const auto est = connective_estimates(hex, kappa);
  REQUIRE(est.fekete_bound_holds.has_value());
  CHECK(*est.fekete_bound_holds);
  CHECK(est.root.size() == 20);
  REQUIRE(est.fit.has_value());
  CHECK(est.fit->gamma == doctest::Approx(43.0 / 32.0).epsilon(0.05));
  const auto free_fit = connective_estimates(hex, std::nullopt);
  REQUIRE(free_fit.fit.has_value());
  CHECK(free_fit.fit->kappa == doctest::Approx(kappa).epsilon(0.01));
}

TEST_CASE("exact sampler lists every walk once") {
  const ExactSawSampler s(LatticeKind::Square, 6);
  CHECK(s.size() == 780);
  std::set<std::vector<Site>> seen;
  for (std::uint64_t i = 0; i < s.size(); ++i) {
    const Walk w = s.walk(i);
    CHECK(w.length() == 6);
    CHECK(is_self_avoiding(w));
    seen.insert(w.sites);
  }
  CHECK(seen.size() == 780);
  RngStream r(1, 1);
  CHECK(is_self_avoiding(s.sample(r)));
}

TEST_CASE("pivot sampler produces self-avoiding walks") {
  for (const auto kind : {LatticeKind::Square, LatticeKind::Hex}) {
    RngStream r(3, static_cast<std::uint64_t>(kind));
    PivotStats stats;
    const Walk w = sample_pivot_saw(kind, 200, r, {}, &stats);
    CHECK(w.length() == 200);
    CHECK(is_self_avoiding(w));
    CHECK(stats.attempted == 2000);
    CHECK(stats.accepted > 0);
  }
}

TEST_CASE("pivot end-to-end distance on short walks matches exact enumeration") {
  // Mean squared end-to-end distance over all 8-step walks versus pivot samples.
  const ExactSawSampler exact(LatticeKind::Square, 8);
  double exact_r2 = 0;
  for (std::uint64_t i = 0; i < exact.size(); ++i) {
    const Site e = exact.walk(i).sites.back();
    exact_r2 += e.x * e.x + e.y * e.y;
  }
  exact_r2 /= double(exact.size());
  RngStream r(11, 0);
  const int m = 4000;
  double sum = 0, sum2 = 0;
  for (int k = 0; k < m; ++k) {
    const Site e = sample_pivot_saw(LatticeKind::Square, 8, r, {400}).sites.back();
    const double v = e.x * e.x + e.y * e.y;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / m;
  const double se = std::sqrt((sum2 / m - mean * mean) / m);
  CHECK(std::abs(mean - exact_r2) < 4 * se);
}

TEST_CASE("self-avoidance check and export") {
  Walk w{LatticeKind::Square, {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}};
  CHECK_FALSE(is_self_avoiding(w));
  w.sites.pop_back();
  CHECK(is_self_avoiding(w));
  Walk gap{LatticeKind::Square, {{0, 0}, {2, 0}}};
  CHECK_FALSE(is_self_avoiding(gap));
  std::ostringstream out;
  const Walk ws[] = {w};
  CHECK(export_rescaled_walks(ws, out) == 4);
}
