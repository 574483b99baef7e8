// Compiled with -mavx2 -mpopcnt; only called after a runtime CPU check.
#include <immintrin.h>

#include "autojournal/simd.hpp"

namespace autojournal::simd::avx2 {

namespace {

using u128 = unsigned __int128;

// Bits 0, 3, 6, ..., 93: the first channel of each of 32 pixels in a
// 96-byte block.
constexpr u128 first_channel_bits() {
  u128 m = 0;
  for (int k = 0; k < 32; ++k) m |= u128{1} << (3 * k);
  return m;
}

inline std::uint32_t eq_mask(const std::uint8_t* a, const std::uint8_t* b) {
  const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a));
  const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b));
  return static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, vb)));
}

}  // namespace

std::size_t count_equal_rgb(const std::uint8_t* a, const std::uint8_t* b, std::size_t pixels) {
  constexpr u128 kSelect = first_channel_bits();
  std::size_t equal = 0;
  std::size_t p = 0;
  for (; p + 32 <= pixels; p += 32) {
    const std::size_t off = p * 3;
    const u128 m = u128{eq_mask(a + off, b + off)} | (u128{eq_mask(a + off + 32, b + off + 32)} << 32) |
                   (u128{eq_mask(a + off + 64, b + off + 64)} << 64);
    const u128 all3 = m & (m >> 1) & (m >> 2) & kSelect;
    equal += static_cast<std::size_t>(_mm_popcnt_u64(static_cast<std::uint64_t>(all3)) +
                                      _mm_popcnt_u64(static_cast<std::uint64_t>(all3 >> 64)));
  }
  return equal + scalar::count_equal_rgb(a + p * 3, b + p * 3, pixels - p);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace autojournal::simd::avx2
