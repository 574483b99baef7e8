#include "autojournal/simd.hpp"

namespace autojournal::simd::scalar {

std::size_t count_equal_rgb(const std::uint8_t* a, const std::uint8_t* b, std::size_t pixels) {
  std::size_t equal = 0;
  for (std::size_t p = 0; p < pixels; ++p) {
    const std::size_t i = p * 3;
    equal += (a[i] == b[i] && a[i + 1] == b[i + 1] && a[i + 2] == b[i + 2]) ? 1 : 0;
  }
  return equal;
}

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace autojournal::simd::scalar
