#pragma once
// Seeded counter-based randomness, primitive samplers and proportion
// estimates with Wilson score intervals.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace stochlab {

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Keyed hash of an ordered tuple of words; used for lazily sampled
/// environments where a state must be a pure function of its coordinates.
constexpr std::uint64_t hash_words(std::uint64_t key) noexcept { return mix64(key); }

template <class... Rest>
constexpr std::uint64_t hash_words(std::uint64_t key, std::uint64_t first,
                                   Rest... rest) noexcept {
  return hash_words(mix64(key ^ mix64(first + 0x632be59bd9b4e019ULL)), rest...);
}

/// Maps a 64-bit word to a double in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Deterministic random stream addressed by (master_seed, stream_id).
///
/// Draw i of a stream is mix64(key + (i + 1) * golden), so any draw is
/// addressable without replaying the earlier ones. Satisfies
/// UniformRandomBitGenerator so it can feed <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : master_seed_(master_seed),
        stream_id_(stream_id),
        key_(hash_words(master_seed, stream_id)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return at(counter_++); }

  /// Value of draw `index` without advancing the stream.
  result_type at(std::uint64_t index) const noexcept {
    return mix64(key_ + (index + 1) * 0x9e3779b97f4a7c15ULL);
  }

  double uniform01() noexcept { return to_unit((*this)()); }

  /// Child stream for a sub-experiment; still a pure function of the parent's
  /// (seed, id) pair and `child`.
  RngStream child(std::uint64_t child) const noexcept {
    return RngStream(key_, child);
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return RngStream(master_seed, stream_id);
}

// Samplers. Each validates its parameters and throws InvalidParameter.
bool sample_bernoulli(RngStream& s, double p);
double sample_uniform01(RngStream& s);
double sample_exponential(RngStream& s, double rate);
double sample_gaussian(RngStream& s, double mean, double variance);
std::uint64_t sample_poisson(RngStream& s, double mean);

/// Standard normal from two uniforms (Box-Muller, cosine branch).
double gaussian_from_bits(std::uint64_t a, std::uint64_t b) noexcept;

struct EstimateCI {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double confidence = 0.95;

  double standard_error() const noexcept;
};

/// Wilson score interval for a binomial proportion.
EstimateCI estimate_proportion(std::uint64_t successes, std::uint64_t trials,
                               double confidence = 0.95);

/// Two-sided normal quantile z with P(|Z| <= z) = confidence.
double normal_two_sided_quantile(double confidence);

/// |a - b| divided by the pooled standard error sqrt(se_a^2 + se_b^2).
/// Returns 0 when both estimates are exact (zero pooled SE) and equal.
double pooled_se_distance(const EstimateCI& a, const EstimateCI& b);

/// Seed from the STOCHLAB_SEED environment variable, or `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

inline constexpr std::uint64_t kDefaultSeed = 20240601;

}  // namespace stochlab
