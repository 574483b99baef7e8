#pragma once

// Data-parallel inner loops used by dedup (raster comparison) and the
// evaluator (dot products over embeddings). Each kernel has a scalar
// reference implementation and vectorized variants; the best variant the
// host supports is selected once at startup.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace autojournal::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // Number of 3-byte pixels at which a and b agree on all channels.
  // a.size() == b.size() and a multiple of 3.
  std::size_t (*count_equal_rgb)(const std::uint8_t* a, const std::uint8_t* b,
                                 std::size_t pixels);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

// Every variant compiled into this binary and runnable on this host,
// scalar first. Used by the equivalence tests.
std::vector<KernelTable> available_kernels();

// The table selected for this process. AUTOJOURNAL_SIMD=scalar|avx2|neon
// forces a variant when the host supports it.
const KernelTable& active_kernels();

std::size_t count_equal_rgb(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

namespace scalar {
std::size_t count_equal_rgb(const std::uint8_t* a, const std::uint8_t* b, std::size_t pixels);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(AUTOJOURNAL_HAVE_AVX2)
namespace avx2 {
std::size_t count_equal_rgb(const std::uint8_t* a, const std::uint8_t* b, std::size_t pixels);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

#if defined(AUTOJOURNAL_HAVE_NEON)
namespace neon {
std::size_t count_equal_rgb(const std::uint8_t* a, const std::uint8_t* b, std::size_t pixels);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace neon
#endif

}  // namespace autojournal::simd
