#include "stochlab/randstat.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

namespace stochlab {

bool sample_bernoulli(RngStream& s, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("bernoulli: p must lie in [0,1]");
  // uniform01 < 1 always, so p = 1 is always true and p = 0 always false.
  return s.uniform01() < p;
}

double sample_uniform01(RngStream& s) { return s.uniform01(); }

double sample_exponential(RngStream& s, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw InvalidParameter("exponential: rate must be positive and finite");
  return -std::log1p(-s.uniform01()) / rate;
}

double gaussian_from_bits(std::uint64_t a, std::uint64_t b) noexcept {
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - to_unit(a);
  const double u2 = to_unit(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_gaussian(RngStream& s, double mean, double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance) || !std::isfinite(mean))
    throw InvalidParameter("gaussian: variance must be non-negative");
  const auto a = s();
  const auto b = s();
  return mean + std::sqrt(variance) * gaussian_from_bits(a, b);
}

std::uint64_t sample_poisson(RngStream& s, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw InvalidParameter("poisson: mean must be non-negative");
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Inversion by sequential search.
    const double u = s.uniform01();
    double term = std::exp(-mean);
    double cdf = term;
    std::uint64_t k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      term *= mean / static_cast<double>(k);
      cdf += term;
    }
    return k;
  }
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(s);
}

double normal_two_sided_quantile(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidParameter("confidence must lie in (0,1)");
  const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, 0.5 + confidence / 2.0);
}

double EstimateCI::standard_error() const noexcept {
  if (trials == 0) return 0.0;
  return std::sqrt(point * (1.0 - point) / static_cast<double>(trials));
}

EstimateCI estimate_proportion(std::uint64_t successes, std::uint64_t trials,
                               double confidence) {
  if (trials == 0) throw InvalidParameter("estimate_proportion: trials must be >= 1");
  if (successes > trials)
    throw InvalidParameter("estimate_proportion: successes exceed trials");
  const double z = normal_two_sided_quantile(confidence);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;

  EstimateCI ci;
  ci.successes = successes;
  ci.trials = trials;
  ci.point = phat;
  ci.confidence = confidence;
  // The endpoints are exact at 0 and 1; clamp rounding elsewhere so that
  // lower <= point <= upper holds bit-for-bit.
  ci.lower = successes == 0 ? 0.0 : std::min(phat, std::max(0.0, centre - half));
  ci.upper = successes == trials ? 1.0 : std::max(phat, std::min(1.0, centre + half));
  return ci;
}

double pooled_se_distance(const EstimateCI& a, const EstimateCI& b) {
  const double se = std::hypot(a.standard_error(), b.standard_error());
  const double diff = std::abs(a.point - b.point);
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("STOCHLAB_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const auto value = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw InvalidParameter(std::string("STOCHLAB_SEED is not an unsigned integer: ") + env);
  return value;
}

}  // namespace stochlab
