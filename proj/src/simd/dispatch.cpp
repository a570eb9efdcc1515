#include <atomic>
#include <stdexcept>
#include <string>

#include "stochlab/simd/kernels.hpp"

namespace stochlab::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(STOCHLAB_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect() noexcept { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend>& selected() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

const char* to_string(Backend b) noexcept { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool backend_available(Backend b) noexcept { return b == Backend::Scalar || cpu_has_avx2(); }

Backend active_backend() noexcept { return selected().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument(std::string("SIMD backend not available: ") + to_string(b));
  selected().store(b, std::memory_order_relaxed);
}

void ray_segment_params(double ox, double oy, double dx, double dy, const SegmentSoA& segs,
                        std::span<double> t_out, std::span<double> s_out) {
#if defined(STOCHLAB_HAVE_AVX2)
  if (active_backend() == Backend::Avx2)
    return avx2::ray_segment_params(ox, oy, dx, dy, segs, t_out, s_out);
#endif
  scalar::ray_segment_params(ox, oy, dx, dy, segs, t_out, s_out);
}

std::size_t within_radius(double px, double py, double r2, std::span<const double> xs,
                          std::span<const double> ys, std::span<std::uint32_t> out) {
#if defined(STOCHLAB_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) return avx2::within_radius(px, py, r2, xs, ys, out);
#endif
  return scalar::within_radius(px, py, r2, xs, ys, out);
}

}  // namespace stochlab::simd
