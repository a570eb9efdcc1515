#pragma once
// Self-avoiding walks: exact enumeration on the square and hexagonal
// lattices and on percolation configurations, connective-constant
// estimates, and uniform sampling.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stochlab/lattice.hpp"
#include "stochlab/randstat.hpp"

namespace stochlab {

using BigInt = boost::multiprecision::cpp_int;

struct Walk {
  LatticeKind kind = LatticeKind::Square;
  std::vector<Site> sites;  // sites.front() is the start

  int length() const noexcept { return static_cast<int>(sites.size()) - 1; }
};

/// Consecutive sites adjacent and no site repeated.
bool is_self_avoiding(const Walk& walk);

struct SawCount {
  LatticeKind kind = LatticeKind::Square;
  Site start;
  int n = 0;
  BigInt sigma;
};

struct EnumerationLimits {
  int max_square = 26;
  int max_hex = 36;
  unsigned workers = 1;
};

/// Exact number of n-step walks from the origin.
SawCount count_saws(LatticeKind kind, int n, const EnumerationLimits& limits = {});

/// sigma_0 .. sigma_n from a single enumeration pass.
std::vector<SawCount> count_saws_upto(LatticeKind kind, int n,
                                      const EnumerationLimits& limits = {});

/// Exact number of n-step walks from v that use open edges of `config` only.
/// Requires sup_norm(v) + n <= radius so the box never clips a walk.
SawCount count_saws_on_cluster(const BondConfig& config, Site v, int n);

// ---------------------------------------------------------------------------
// Connective constant.

/// (1 + sqrt 2)^n = a + b sqrt 2 with exact integers.
std::pair<BigInt, BigInt> one_plus_sqrt2_power(int n);

/// Exact test of sigma^2 >= (1 + sqrt 2)^n. Implied by Fekete, since
/// sigma^(1/n) >= kappa(hex) = sqrt(2 + sqrt 2); the bound is not sharp.
bool meets_hex_fekete_bound(const BigInt& sigma, int n);

/// Exact test of a^(1/m) > b^(1/n) for positive integers.
bool root_greater(const BigInt& a, int m, const BigInt& b, int n);

struct PowerLawFit {
  double amplitude = 0.0;  // A
  double gamma = 0.0;      // exponent in n^(gamma - 1)
  double kappa = 0.0;      // supplied or fitted growth rate
  bool kappa_fitted = false;
  std::vector<double> residuals;
};

struct ConnectiveEstimate {
  LatticeKind kind = LatticeKind::Square;
  std::vector<int> n;
  std::vector<double> root;  // sigma_n^(1/n)
  /// Set when a rigorous lower bound is known for the lattice (hex): true iff
  /// every sigma_n^(1/n) is at least that bound, checked in exact arithmetic.
  std::optional<bool> fekete_bound_holds;
  std::optional<int> first_bound_violation;
  std::optional<PowerLawFit> fit;
};

/// Counts must be for consecutive n starting at 1 (a leading n = 0 entry is
/// ignored). When `kappa` is given the fit is two-parameter, otherwise
/// kappa is fitted too; the fit needs at least 4 points with n >= fit_from.
ConnectiveEstimate connective_estimates(std::span<const SawCount> counts,
                                        std::optional<double> kappa = std::nullopt,
                                        int fit_from = 4);

// ---------------------------------------------------------------------------
// Uniform sampling.

/// Uniform sampler backed by a full list of walks; built when sigma_n is at
/// most `max_walks`.
class ExactSawSampler {
 public:
  ExactSawSampler(LatticeKind kind, int n, std::uint64_t max_walks = 10'000'000);

  std::uint64_t size() const noexcept { return codes_.size(); }
  Walk walk(std::uint64_t index) const;
  Walk sample(RngStream& stream) const;

 private:
  LatticeKind kind_;
  int n_;
  std::vector<std::uint64_t> codes_;  // 2 bits per step
};

/// Pivot-algorithm sampler. Each call runs an independent chain from a
/// straight (square) or zigzag (hex) rod in a uniformly random lattice
/// orientation, for `burn_in` attempted pivots (default 10 n).
struct PivotOptions {
  std::optional<std::uint64_t> burn_in;
};

struct PivotStats {
  std::uint64_t attempted = 0;
  std::uint64_t accepted = 0;
};

Walk sample_pivot_saw(LatticeKind kind, int n, RngStream& stream,
                      const PivotOptions& options = {}, PivotStats* stats = nullptr);

/// Exact enumeration when sigma_n <= 10^7, pivot algorithm otherwise.
Walk sample_uniform_saw(LatticeKind kind, int n, RngStream& stream);

/// Euclidean embedding: identity on the square lattice; unit-edge honeycomb
/// for brick-wall hexagonal coordinates.
std::pair<double, double> embed(LatticeKind kind, Site s) noexcept;

/// Writes "walk,step,x,y" rows with coordinates multiplied by n^(-3/4) of
/// each walk. Returns the number of rows written.
std::size_t export_rescaled_walks(std::span<const Walk> samples, std::ostream& out);

}  // namespace stochlab
