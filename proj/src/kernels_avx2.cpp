// AVX2 variant. Compiled with -mavx2 -mpopcnt; reached only through runtime dispatch.

#include "sigsub/kernels.hpp"

#if SIGSUB_X86

#include <immintrin.h>

namespace sigsub::kernels::avx2 {

namespace {

// Per-byte popcount via a nibble lookup table.
inline __m256i popcount_bytes(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,  //
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
}

// popcount of each 64-bit lane
inline __m256i popcount_lanes(__m256i v) { return _mm256_sad_epu8(popcount_bytes(v), _mm256_setzero_si256()); }

inline std::uint32_t scalar_row(const std::uint64_t* row, const std::uint64_t* mask, std::size_t from,
                                std::size_t words) {
  std::uint64_t c = 0;
  for (std::size_t w = from; w < words; ++w) c += static_cast<std::uint64_t>(_mm_popcnt_u64(row[w] & mask[w]));
  return static_cast<std::uint32_t>(c);
}

}  // namespace

void and_popcount_rows(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                       const std::uint64_t* mask, std::uint32_t* out) {
  alignas(32) std::uint64_t lanes[4];
  std::size_t r = 0;

  if (words == 1) {
    // four rows per vector
    const __m256i m = _mm256_set1_epi64x(static_cast<long long>(mask[0]));
    for (; r + 4 <= row_count; r += 4) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(rows + r));
      _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), popcount_lanes(_mm256_and_si256(v, m)));
      for (int i = 0; i < 4; ++i) out[r + i] = static_cast<std::uint32_t>(lanes[i]);
    }
  } else if (words == 2) {
    // two rows per vector
    const __m256i m = _mm256_setr_epi64x(static_cast<long long>(mask[0]), static_cast<long long>(mask[1]),
                                         static_cast<long long>(mask[0]), static_cast<long long>(mask[1]));
    for (; r + 2 <= row_count; r += 2) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(rows + r * 2));
      _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), popcount_lanes(_mm256_and_si256(v, m)));
      out[r] = static_cast<std::uint32_t>(lanes[0] + lanes[1]);
      out[r + 1] = static_cast<std::uint32_t>(lanes[2] + lanes[3]);
    }
  } else if (words >= 4) {
    for (; r < row_count; ++r) {
      const std::uint64_t* row = rows + r * words;
      __m256i acc = _mm256_setzero_si256();
      std::size_t w = 0;
      for (; w + 4 <= words; w += 4) {
        const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + w));
        const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mask + w));
        acc = _mm256_add_epi64(acc, popcount_lanes(_mm256_and_si256(a, b)));
      }
      _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
      out[r] = static_cast<std::uint32_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]) + scalar_row(row, mask, w, words);
    }
  }

  for (; r < row_count; ++r) out[r] = scalar_row(rows + r * words, mask, 0, words);
}

}  // namespace sigsub::kernels::avx2

#endif
