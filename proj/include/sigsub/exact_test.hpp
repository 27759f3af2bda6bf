#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sigsub {

enum class Tail { left, right, two };

std::string_view to_string(Tail tail);
std::optional<Tail> parse_tail(std::string_view text);
/// Tail seen from the other class: left and right exchange, two is unchanged.
Tail mirrored(Tail tail);

/// How ψ(σ) is compared against α when deciding testability.
enum class Comparison { non_strict, strict };

/// 2x2 table with margins n (positive class), n_prime (negative class).
struct ContingencyTable {
  std::uint32_t x = 0;
  std::uint32_t x_prime = 0;
  std::uint32_t n = 0;
  std::uint32_t n_prime = 0;

  std::uint32_t margin() const noexcept { return x + x_prime; }
};

struct TestResult {
  double q_at_x = 0.0;
  double p_left = 0.0;
  double p_right = 0.0;
  double p_two = 0.0;
  Tail tail_used = Tail::two;

  double p_value() const noexcept {
    switch (tail_used) {
      case Tail::left: return p_left;
      case Tail::right: return p_right;
      case Tail::two: return p_two;
    }
    return p_two;
  }
};

/// ln(k!) for k <= limit, in extended precision. The shared cache grows on demand and is
/// safe to call concurrently.
long double log_factorial(std::uint64_t k);
long double log_binomial(std::uint64_t n, std::uint64_t k);

/// Hypergeometric mass C(n,x) C(n',f-x) / C(n+n',f). Throws std::domain_error when x is
/// outside [max(0, f-n'), min(f, n)].
double hypergeom_mass(std::uint32_t x, std::uint32_t f, std::uint32_t n, std::uint32_t n_prime);

/// Fisher's exact test; p_two = min(1, 2 min(p_left, p_right)).
TestResult fisher_pvalue(const ContingencyTable& table, Tail tail);

/// ψ(f): the smallest p-value any table with margin f can reach. For f > n this is
/// 1/C(n+n', n), which keeps ψ non-increasing. Requires n <= n_prime.
double min_attainable_pvalue(std::uint32_t f, std::uint32_t n, std::uint32_t n_prime, Tail tail);
/// Convenience overload that throws std::domain_error for a negative margin.
double min_attainable_pvalue(std::int64_t f, std::uint32_t n, std::uint32_t n_prime, Tail tail);

/// σ_min: smallest σ >= 1 with ψ(σ) <= α (or < α under Comparison::strict). Empty when no
/// frequency is testable. Since ψ is constant beyond n it suffices to scan σ = 1..n.
std::optional<std::uint32_t> min_testable_frequency(double alpha, std::uint32_t n, std::uint32_t n_prime,
                                                    Tail tail, Comparison cmp = Comparison::non_strict);

/// p-values for every x of one margin f, precomputed once. Used in permutation loops where the
/// same margin is evaluated many times.
class MarginPValues {
 public:
  MarginPValues(std::uint32_t f, std::uint32_t n, std::uint32_t n_prime, Tail tail);

  std::uint32_t lowest_x() const noexcept { return lo_; }
  std::uint32_t highest_x() const noexcept { return hi_; }
  /// x must lie in [lowest_x(), highest_x()].
  double operator()(std::uint32_t x) const { return p_[x - lo_]; }

 private:
  std::uint32_t lo_;
  std::uint32_t hi_;
  std::vector<double> p_;
};

}  // namespace sigsub
