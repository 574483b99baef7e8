#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "autojournal/simd.hpp"

namespace autojournal::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

namespace {

bool host_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(AUTOJOURNAL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(AUTOJOURNAL_HAVE_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

// Most capable first.
std::vector<KernelTable> compiled_kernels() {
  std::vector<KernelTable> tables;
#if defined(AUTOJOURNAL_HAVE_AVX2)
  tables.push_back({Isa::Avx2, &avx2::count_equal_rgb, &avx2::dot});
#endif
#if defined(AUTOJOURNAL_HAVE_NEON)
  tables.push_back({Isa::Neon, &neon::count_equal_rgb, &neon::dot});
#endif
  tables.push_back({Isa::Scalar, &scalar::count_equal_rgb, &scalar::dot});
  return tables;
}

KernelTable select_kernels() {
  const auto tables = compiled_kernels();
  const char* forced = std::getenv("AUTOJOURNAL_SIMD");
  if (forced != nullptr && *forced != '\0') {
    for (const auto& t : tables) {
      if (to_string(t.isa) == forced && host_supports(t.isa)) return t;
    }
  }
  for (const auto& t : tables) {
    if (host_supports(t.isa)) return t;
  }
  return tables.back();
}

}  // namespace

std::vector<KernelTable> available_kernels() {
  std::vector<KernelTable> out;
  auto tables = compiled_kernels();
  for (auto it = tables.rbegin(); it != tables.rend(); ++it) {
    if (host_supports(it->isa)) out.push_back(*it);
  }
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable table = select_kernels();
  return table;
}

std::size_t count_equal_rgb(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size() || a.size() % 3 != 0) {
    throw std::invalid_argument("count_equal_rgb: rasters must be equal-length RGB");
  }
  return active_kernels().count_equal_rgb(a.data(), b.data(), a.size() / 3);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return active_kernels().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace autojournal::simd
