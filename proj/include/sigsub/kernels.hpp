#pragma once
// Bitset intersection kernels used by the permutation loop.
//
// The occurrence matrix is row-major: row r holds `words` 64-bit words starting at
// rows[r * words]. Every variant computes out[r] = popcount(row_r & mask).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#if defined(__x86_64__) || defined(_M_X64)
#define SIGSUB_X86 1
#else
#define SIGSUB_X86 0
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define SIGSUB_ARM64 1
#else
#define SIGSUB_ARM64 0
#endif

namespace sigsub::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

using AndPopcountFn = void (*)(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                               const std::uint64_t* mask, std::uint32_t* out);

namespace scalar {
void and_popcount_rows(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                       const std::uint64_t* mask, std::uint32_t* out);
}

#if SIGSUB_X86
namespace avx2 {
// requires AVX2; call only through dispatch or after isa_available(Isa::avx2)
void and_popcount_rows(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                       const std::uint64_t* mask, std::uint32_t* out);
}
#endif

#if SIGSUB_ARM64
namespace neon {
void and_popcount_rows(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                       const std::uint64_t* mask, std::uint32_t* out);
}
#endif

/// Compiled in and supported by the running CPU.
bool isa_available(Isa isa);

/// Best available variant, or the override when one is set.
Isa active_isa();

/// Forces a variant (tests, benchmarks). nullopt restores detection. Throws
/// std::invalid_argument when the variant is unavailable.
void set_isa_override(std::optional<Isa> isa);

AndPopcountFn and_popcount_rows_for(Isa isa);

/// Dispatching entry point.
void and_popcount_rows(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                       const std::uint64_t* mask, std::uint32_t* out);

}  // namespace sigsub::kernels
