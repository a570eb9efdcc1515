#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "stochlab/randstat.hpp"
#include "stochlab/simd/kernels.hpp"

using namespace stochlab;
namespace simd = stochlab::simd;

namespace {

struct Segments {
  std::vector<double> ax, ay, ex, ey;
  simd::SegmentSoA view() const { return {ax, ay, ex, ey}; }
};

Segments random_segments(RngStream& r, std::size_t n) {
  Segments s;
  for (std::size_t i = 0; i < n; ++i) {
    s.ax.push_back(-10 + 20 * r.uniform01());
    s.ay.push_back(-10 + 20 * r.uniform01());
    const double a = 3.14159 * r.uniform01();
    s.ex.push_back(std::cos(a));
    s.ey.push_back(std::sin(a));
  }
  // A segment parallel to the ray.
  if (n > 3) {
    s.ex[3] = 0.6;
    s.ey[3] = 0.8;
  }
  return s;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("scalar ray-segment kernel matches the closed form") {
  RngStream r(1, 1);
  const auto segs = random_segments(r, 37);
  std::vector<double> t(37), s(37);
  simd::scalar::ray_segment_params(0.5, -0.25, 0.6, 0.8, segs.view(), t, s);
  for (std::size_t i = 0; i < 37; ++i) {
    const long double den = 0.6L * segs.ey[i] - 0.8L * segs.ex[i];
    if (std::abs(double(den)) < 1e-15) {
      CHECK(std::isinf(t[i]));
      continue;
    }
    const long double wx = segs.ax[i] - 0.5L, wy = segs.ay[i] + 0.25L;
    CHECK(std::abs(t[i] - double((wx * segs.ey[i] - wy * segs.ex[i]) / den)) < 1e-9);
    CHECK(std::abs(s[i] - double((wx * 0.8L - wy * 0.6L) / den)) < 1e-9);
  }
}

TEST_CASE("scalar radius kernel matches a direct filter") {
  RngStream r(2, 2);
  std::vector<double> xs(101), ys(101);
  for (std::size_t i = 0; i < 101; ++i) xs[i] = 4 * r.uniform01() - 2, ys[i] = 4 * r.uniform01() - 2;
  std::vector<std::uint32_t> out(101);
  const auto n = simd::scalar::within_radius(0.1, -0.2, 1.0, xs, ys, out);
  std::vector<std::uint32_t> want;
  for (std::uint32_t i = 0; i < 101; ++i)
    if ((xs[i] - 0.1) * (xs[i] - 0.1) + (ys[i] + 0.2) * (ys[i] + 0.2) <= 1.0) want.push_back(i);
  CHECK(std::vector<std::uint32_t>(out.begin(), out.begin() + n) == want);
}

TEST_CASE("AVX2 kernels agree bit for bit with the scalar reference") {
  if (!simd::backend_available(simd::Backend::Avx2)) {
    MESSAGE("AVX2 not available on this CPU; skipping");
    CHECK_THROWS(simd::set_backend(simd::Backend::Avx2));
    return;
  }
#if defined(STOCHLAB_HAVE_AVX2)
  RngStream r(3, 3);
  for (const std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 64u, 1001u}) {
    const auto segs = random_segments(r, n);
    std::vector<double> t1(n), s1(n), t2(n), s2(n);
    const double a = 6.28318 * r.uniform01();
    simd::scalar::ray_segment_params(0.3, 0.7, std::cos(a), std::sin(a), segs.view(), t1, s1);
    simd::avx2::ray_segment_params(0.3, 0.7, std::cos(a), std::sin(a), segs.view(), t2, s2);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(same_bits(t1[i], t2[i]));
      CHECK(same_bits(s1[i], s2[i]));
    }
    std::vector<std::uint32_t> o1(n), o2(n);
    const auto k1 = simd::scalar::within_radius(0.0, 0.0, 25.0, segs.ax, segs.ay, o1);
    const auto k2 = simd::avx2::within_radius(0.0, 0.0, 25.0, segs.ax, segs.ay, o2);
    CHECK(k1 == k2);
    CHECK(std::equal(o1.begin(), o1.begin() + k1, o2.begin()));
  }
#endif
}

TEST_CASE("backend selection") {
  const auto initial = simd::active_backend();
  simd::set_backend(simd::Backend::Scalar);
  CHECK(simd::active_backend() == simd::Backend::Scalar);
  CHECK(std::string(simd::to_string(simd::Backend::Scalar)) == "scalar");
  simd::set_backend(initial);
}
