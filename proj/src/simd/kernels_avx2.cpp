// Compiled with -mavx2 and without FMA; only called after a runtime check.

#include <immintrin.h>

#include <limits>

#include "stochlab/simd/kernels.hpp"

namespace stochlab::simd::avx2 {

void ray_segment_params(double ox, double oy, double dx, double dy, const SegmentSoA& segs,
                        std::span<double> t_out, std::span<double> s_out) {
  const std::size_t n = segs.size();
  const __m256d vox = _mm256_set1_pd(ox);
  const __m256d voy = _mm256_set1_pd(oy);
  const __m256d vdx = _mm256_set1_pd(dx);
  const __m256d vdy = _mm256_set1_pd(dy);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ex = _mm256_loadu_pd(segs.ex.data() + i);
    const __m256d ey = _mm256_loadu_pd(segs.ey.data() + i);
    const __m256d wx = _mm256_sub_pd(_mm256_loadu_pd(segs.ax.data() + i), vox);
    const __m256d wy = _mm256_sub_pd(_mm256_loadu_pd(segs.ay.data() + i), voy);
    const __m256d denom = _mm256_sub_pd(_mm256_mul_pd(vdx, ey), _mm256_mul_pd(vdy, ex));
    const __m256d tn = _mm256_sub_pd(_mm256_mul_pd(wx, ey), _mm256_mul_pd(wy, ex));
    const __m256d sn = _mm256_sub_pd(_mm256_mul_pd(wx, vdy), _mm256_mul_pd(wy, vdx));
    const __m256d parallel = _mm256_cmp_pd(denom, zero, _CMP_EQ_OQ);
    const __m256d t = _mm256_blendv_pd(_mm256_div_pd(tn, denom), inf, parallel);
    const __m256d s = _mm256_blendv_pd(_mm256_div_pd(sn, denom), inf, parallel);
    _mm256_storeu_pd(t_out.data() + i, t);
    _mm256_storeu_pd(s_out.data() + i, s);
  }
  if (i < n) {
    const SegmentSoA rest{segs.ax.subspan(i), segs.ay.subspan(i), segs.ex.subspan(i),
                          segs.ey.subspan(i)};
    scalar::ray_segment_params(ox, oy, dx, dy, rest, t_out.subspan(i), s_out.subspan(i));
  }
}

std::size_t within_radius(double px, double py, double r2, std::span<const double> xs,
                          std::span<const double> ys, std::span<std::uint32_t> out) {
  const std::size_t n = xs.size();
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  const __m256d vr2 = _mm256_set1_pd(r2);
  std::size_t k = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + i), vpx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + i), vpy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    int mask = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
    while (mask != 0) {
      const int lane = __builtin_ctz(static_cast<unsigned>(mask));
      out[k++] = static_cast<std::uint32_t>(i + static_cast<std::size_t>(lane));
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    if (dx * dx + dy * dy <= r2) out[k++] = static_cast<std::uint32_t>(i);
  }
  return k;
}

}  // namespace stochlab::simd::avx2
