#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sigsub/bitset.hpp"
#include "sigsub/exact_test.hpp"
#include "sigsub/graph.hpp"
#include "sigsub/miner.hpp"

namespace sigsub {

/// h label permutations, each preserving exactly n positives among n + n' graphs.
struct PermutationPlan {
  std::uint64_t iterations = 1000;
  std::uint64_t seed = 0;
  std::uint32_t n = 0;
  std::uint32_t n_prime = 0;

  static PermutationPlan for_database(const GraphDatabase& db, std::uint64_t iterations, std::uint64_t seed) {
    return {iterations, seed, db.n(), db.n_prime()};
  }
  /// Throws std::invalid_argument for zero iterations or an empty class.
  void validate() const;
};

/// Seed of the RNG stream for permutation j. Depends only on (seed, j).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t j);

/// Positive-class mask of permutation j: a Fisher-Yates shuffle of n ones and n' zeros.
OccurrenceBits permuted_mask(const PermutationPlan& plan, std::uint64_t j);

/// x under the permuted labeling: popcount(occ & perm_mask). Throws std::invalid_argument on a
/// width mismatch.
std::uint32_t permuted_positive_count(const OccurrenceBits& occ, const OccurrenceBits& perm_mask);

/// Row-major occurrence bitsets of a pattern list, padded to whole words.
class OccurrenceMatrix {
 public:
  OccurrenceMatrix(std::span<const Pattern> patterns, std::size_t width);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t words() const noexcept { return words_; }
  const std::uint64_t* data() const noexcept { return bits_.data(); }
  OccurrenceBits row(std::size_t r) const;

 private:
  std::size_t rows_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

/// Element j is the minimum Fisher p-value over `testable` under permutation j. Bitwise
/// reproducible for a given plan regardless of `threads`. Throws NoTestableError when
/// `testable` is empty.
std::vector<double> min_p_distribution(std::span<const Pattern> testable, const PermutationPlan& plan,
                                       const GraphDatabase& db, Tail tail, unsigned threads = 1);

struct EffectiveTestsResult {
  double alpha_prime = 0.0;
  double m_eff = 1.0;
  double m_eff_raw = 1.0;  // before clamping
  std::vector<double> min_p_samples;
};

/// α' = the ⌈α·h⌉-th smallest sample; m_eff = log(1-α)/log(1-α'), clamped to [1, testable_count].
/// Throws std::invalid_argument for no samples and std::domain_error for α outside (0, 1).
EffectiveTestsResult effective_num_tests(std::vector<double> min_p_samples, double alpha,
                                         std::size_t testable_count);

/// Fraction of permutations whose minimum p-value is strictly below `threshold`. Zero for an
/// empty testable set.
double empirical_fwer(std::span<const Pattern> testable, double threshold, const PermutationPlan& plan,
                      const GraphDatabase& db, Tail tail, unsigned threads = 1);

}  // namespace sigsub
