#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigsub/exact_test.hpp"
#include "sigsub/graph.hpp"
#include "sigsub/miner.hpp"

namespace sigsub {

enum class SearchStrategy { one_pass, decremental, incremental, bisection };

std::string_view to_string(SearchStrategy strategy);
/// Accepts the CLI spellings: onepass, decremental, incremental, bisection.
std::optional<SearchStrategy> parse_strategy(std::string_view text);

struct SearchOptions {
  double alpha = 0.05;
  Tail tail = Tail::two;
  std::optional<std::uint32_t> max_vertices;
  bool count_singletons = true;
  Comparison comparison = Comparison::non_strict;
  MinerControl control;
};

/// ψ(σ) and the admissible pattern count ⌊α/ψ(σ)⌋ for one database shape. All strategies share
/// this so they make bit-identical decisions.
class TestabilityBound {
 public:
  TestabilityBound(double alpha, std::uint32_t n, std::uint32_t n_prime, Tail tail);

  double psi(std::uint32_t sigma) const { return min_attainable_pvalue(sigma, n_, n_prime_, tail_); }
  /// ⌊α/ψ(σ)⌋, saturated at the uint64 maximum.
  std::uint64_t budget(std::uint32_t sigma) const;
  /// The root condition at σ: `count` frequent patterns fit within α/ψ(σ).
  bool admits(std::uint64_t count, std::uint32_t sigma) const { return count <= budget(sigma); }

  double alpha() const noexcept { return alpha_; }
  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t n_prime() const noexcept { return n_prime_; }

 private:
  double alpha_;
  std::uint32_t n_;
  std::uint32_t n_prime_;
  Tail tail_;
};

/// One FSM invocation as seen by the search.
struct MiningTrace {
  std::uint32_t sigma = 0;
  std::optional<std::uint64_t> budget;
  MiningStatus status = MiningStatus::completed;
  std::uint64_t emitted = 0;
  double millis = 0.0;
};

struct RootSearchResult {
  /// False when ψ(σ) > α for every σ: nothing can ever be significant.
  bool has_testable_frequency = false;
  /// True when an external stop (deadline, cancel flag) interrupted the search.
  bool cancelled = false;
  std::uint32_t sigma_min = 0;
  std::uint32_t sigma_rt = 0;
  double k_rt = 0.0;
  std::vector<Pattern> testable;
  std::uint64_t fsm_invocations = 0;
  std::uint64_t patterns_expanded = 0;
  std::chrono::duration<double> wall_time{0};
  std::vector<MiningTrace> trace;
};

/// m(k) = |{H : ψ(f(H)) <= α/k}| over a frequency multiset. The comparison allows a relative
/// slack of 1e-12 so that k = α/ψ(σ) round-trips to ψ(σ).
std::uint64_t count_m_of_k(std::span<const std::uint32_t> frequencies, double k, double alpha, std::uint32_t n,
                           std::uint32_t n_prime, Tail tail);

RootSearchResult find_root_one_pass(const GraphDatabase& db, const SearchOptions& options);
RootSearchResult find_root_decremental(const GraphDatabase& db, const SearchOptions& options);
RootSearchResult find_root_incremental(const GraphDatabase& db, const SearchOptions& options);
RootSearchResult find_root_bisection(const GraphDatabase& db, const SearchOptions& options);
RootSearchResult find_root(const GraphDatabase& db, const SearchOptions& options, SearchStrategy strategy);

struct SignificanceRecord {
  Pattern pattern;
  std::string code;
  double p_value = 1.0;
  double min_p = 1.0;
  double corrected_threshold = 0.0;
  bool significant = false;
};

/// Tests every pattern at alpha / correction_factor (strict "<"). Records are sorted by
/// (p_value, code). Throws std::invalid_argument when correction_factor < 1.
std::vector<SignificanceRecord> significant_set(std::span<const Pattern> testable, const GraphDatabase& db,
                                                double alpha, Tail tail, double correction_factor);

}  // namespace sigsub
