#pragma once
// Data-parallel inner loops with a scalar reference and an AVX2 variant.
//
// Both variants evaluate the same expressions in the same order without
// fused multiply-add, so their outputs agree bit for bit. The variant is
// chosen once at startup from the CPU feature flags and can be overridden
// (tests pin each backend explicitly).

#include <cstddef>
#include <cstdint>
#include <span>

namespace stochlab::simd {

enum class Backend : std::uint8_t { Scalar, Avx2 };

const char* to_string(Backend b) noexcept;

/// Backends this binary can run on this CPU.
bool backend_available(Backend b) noexcept;

/// Currently selected backend.
Backend active_backend() noexcept;

/// Selects a backend; throws std::invalid_argument if unavailable.
void set_backend(Backend b);

/// Segments in structure-of-arrays form: segment i runs from
/// (ax[i], ay[i]) to (ax[i] + ex[i], ay[i] + ey[i]).
struct SegmentSoA {
  std::span<const double> ax, ay, ex, ey;
  std::size_t size() const noexcept { return ax.size(); }
};

/// For the ray o + t d and each segment a + s e, writes the ray parameter t
/// and the segment parameter s of the crossing of the two supporting lines.
/// Parallel pairs get t = s = +infinity.
void ray_segment_params(double ox, double oy, double dx, double dy, const SegmentSoA& segs,
                        std::span<double> t_out, std::span<double> s_out);

/// Writes to `out` the indices i with (xs[i] - px)^2 + (ys[i] - py)^2 <= r2,
/// in increasing order, and returns how many were written. `out` must hold
/// xs.size() entries.
std::size_t within_radius(double px, double py, double r2, std::span<const double> xs,
                          std::span<const double> ys, std::span<std::uint32_t> out);

// Direct entry points for equivalence testing.
namespace scalar {
void ray_segment_params(double ox, double oy, double dx, double dy, const SegmentSoA& segs,
                        std::span<double> t_out, std::span<double> s_out);
std::size_t within_radius(double px, double py, double r2, std::span<const double> xs,
                          std::span<const double> ys, std::span<std::uint32_t> out);
}  // namespace scalar

namespace avx2 {
void ray_segment_params(double ox, double oy, double dx, double dy, const SegmentSoA& segs,
                        std::span<double> t_out, std::span<double> s_out);
std::size_t within_radius(double px, double py, double r2, std::span<const double> xs,
                          std::span<const double> ys, std::span<std::uint32_t> out);
}  // namespace avx2

}  // namespace stochlab::simd
