#include <atomic>
#include <bit>
#include <stdexcept>

#include "sigsub/kernels.hpp"

namespace sigsub::kernels {

namespace scalar {

void and_popcount_rows(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                       const std::uint64_t* mask, std::uint32_t* out) {
  for (std::size_t r = 0; r < row_count; ++r) {
    const std::uint64_t* row = rows + r * words;
    std::uint32_t c = 0;
    for (std::size_t w = 0; w < words; ++w) c += static_cast<std::uint32_t>(std::popcount(row[w] & mask[w]));
    out[r] = c;
  }
}

}  // namespace scalar

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if SIGSUB_X86 && defined(SIGSUB_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
    case Isa::neon:
#if SIGSUB_ARM64 && defined(SIGSUB_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

// -1: no override, otherwise the Isa value
std::atomic<int> g_override{-1};

}  // namespace

Isa active_isa() {
  static const Isa detected = detect();
  const int o = g_override.load(std::memory_order_relaxed);
  return o < 0 ? detected : static_cast<Isa>(o);
}

void set_isa_override(std::optional<Isa> isa) {
  if (isa && !isa_available(*isa))
    throw std::invalid_argument(std::string("kernel variant unavailable: ") + std::string(to_string(*isa)));
  g_override.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

AndPopcountFn and_popcount_rows_for(Isa isa) {
  switch (isa) {
#if SIGSUB_X86 && defined(SIGSUB_HAVE_AVX2)
    case Isa::avx2: return &avx2::and_popcount_rows;
#endif
#if SIGSUB_ARM64 && defined(SIGSUB_HAVE_NEON)
    case Isa::neon: return &neon::and_popcount_rows;
#endif
    default: return &scalar::and_popcount_rows;
  }
}

void and_popcount_rows(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                       const std::uint64_t* mask, std::uint32_t* out) {
  and_popcount_rows_for(active_isa())(rows, row_count, words, mask, out);
}

}  // namespace sigsub::kernels
