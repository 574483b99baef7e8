#include <arm_neon.h>

#include "autojournal/simd.hpp"

namespace autojournal::simd::neon {

std::size_t count_equal_rgb(const std::uint8_t* a, const std::uint8_t* b, std::size_t pixels) {
  std::size_t equal = 0;
  std::size_t p = 0;
  for (; p + 16 <= pixels; p += 16) {
    const uint8x16x3_t va = vld3q_u8(a + p * 3);
    const uint8x16x3_t vb = vld3q_u8(b + p * 3);
    const uint8x16_t all3 = vandq_u8(vandq_u8(vceqq_u8(va.val[0], vb.val[0]), vceqq_u8(va.val[1], vb.val[1])),
                                     vceqq_u8(va.val[2], vb.val[2]));
    equal += vaddvq_u8(vshrq_n_u8(all3, 7));
  }
  return equal + scalar::count_equal_rgb(a + p * 3, b + p * 3, pixels - p);
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace autojournal::simd::neon
