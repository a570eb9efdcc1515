#include <limits>

#include "stochlab/simd/kernels.hpp"

namespace stochlab::simd::scalar {

void ray_segment_params(double ox, double oy, double dx, double dy, const SegmentSoA& segs,
                        std::span<double> t_out, std::span<double> s_out) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = segs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ex = segs.ex[i];
    const double ey = segs.ey[i];
    const double wx = segs.ax[i] - ox;
    const double wy = segs.ay[i] - oy;
    const double denom = dx * ey - dy * ex;
    const double tn = wx * ey - wy * ex;
    const double sn = wx * dy - wy * dx;
    if (denom == 0.0) {
      t_out[i] = inf;
      s_out[i] = inf;
    } else {
      t_out[i] = tn / denom;
      s_out[i] = sn / denom;
    }
  }
}

std::size_t within_radius(double px, double py, double r2, std::span<const double> xs,
                          std::span<const double> ys, std::span<std::uint32_t> out) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    if (dx * dx + dy * dy <= r2) out[k++] = static_cast<std::uint32_t>(i);
  }
  return k;
}

}  // namespace stochlab::simd::scalar
