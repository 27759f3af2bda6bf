// NEON variant. AArch64 only; NEON is part of the baseline ISA there.

#include "sigsub/kernels.hpp"

#if SIGSUB_ARM64

#include <arm_neon.h>

namespace sigsub::kernels::neon {

void and_popcount_rows(const std::uint64_t* rows, std::size_t row_count, std::size_t words,
                       const std::uint64_t* mask, std::uint32_t* out) {
  for (std::size_t r = 0; r < row_count; ++r) {
    const std::uint64_t* row = rows + r * words;
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t w = 0;
    for (; w + 2 <= words; w += 2) {
      const uint64x2_t v = vandq_u64(vld1q_u64(row + w), vld1q_u64(mask + w));
      const uint8x16_t bytes = vcntq_u8(vreinterpretq_u8_u64(v));
      acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(bytes))));
    }
    std::uint64_t c = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
    for (; w < words; ++w) c += static_cast<std::uint64_t>(__builtin_popcountll(row[w] & mask[w]));
    out[r] = static_cast<std::uint32_t>(c);
  }
}

}  // namespace sigsub::kernels::neon

#endif
