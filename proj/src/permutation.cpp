#include "sigsub/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <thread>

#include "sigsub/errors.hpp"
#include "sigsub/kernels.hpp"

namespace sigsub {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [0, bound). std::uniform_int_distribution is implementation-defined, which would
// make permutations depend on the standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t reject_below = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= reject_below) return r % bound;
  }
}

}  // namespace

void PermutationPlan::validate() const {
  if (iterations == 0) throw std::invalid_argument("permutation count must be >= 1");
  if (n == 0 || n_prime == 0) throw std::invalid_argument("both classes must be non-empty");
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t j) { return splitmix64(seed ^ splitmix64(j)); }

OccurrenceBits permuted_mask(const PermutationPlan& plan, std::uint64_t j) {
  const std::size_t total = std::size_t{plan.n} + plan.n_prime;
  std::vector<std::uint8_t> labels(total, 0);
  std::fill_n(labels.begin(), plan.n, 1);
  std::mt19937_64 rng(stream_seed(plan.seed, j));
  for (std::size_t i = total; i > 1; --i) std::swap(labels[i - 1], labels[uniform_below(rng, i)]);
  OccurrenceBits mask(total);
  for (std::size_t i = 0; i < total; ++i)
    if (labels[i]) mask.set(i);
  return mask;
}

std::uint32_t permuted_positive_count(const OccurrenceBits& occ, const OccurrenceBits& perm_mask) {
  if (occ.width() != perm_mask.width()) throw std::invalid_argument("bit vector widths differ");
  std::uint32_t out = 0;
  kernels::and_popcount_rows(occ.words().data(), 1, occ.words().size(), perm_mask.words().data(), &out);
  return out;
}

OccurrenceMatrix::OccurrenceMatrix(std::span<const Pattern> patterns, std::size_t width)
    : rows_(patterns.size()), words_(OccurrenceBits::word_count(width)), bits_(rows_ * words_, 0) {
  for (std::size_t r = 0; r < rows_; ++r)
    for (auto g : patterns[r].occurrences) {
      if (g >= width) throw std::invalid_argument("occurrence index outside the database");
      bits_[r * words_ + g / 64] |= std::uint64_t{1} << (g % 64);
    }
}

OccurrenceBits OccurrenceMatrix::row(std::size_t r) const {
  OccurrenceBits out(words_ * 64);
  std::copy_n(bits_.begin() + static_cast<std::ptrdiff_t>(r * words_), words_, out.words().begin());
  return out;
}

namespace {

class MinPEvaluator {
 public:
  MinPEvaluator(std::span<const Pattern> testable, const PermutationPlan& plan, const GraphDatabase& db, Tail tail)
      : plan_(plan), matrix_(testable, db.size()) {
    if (testable.empty()) throw NoTestableError("no testable patterns to permute");
    plan.validate();
    if (plan.n != db.n() || plan.n_prime != db.n_prime())
      throw std::invalid_argument("permutation plan does not match the database");
    std::map<std::uint32_t, std::size_t> by_margin;
    for (const auto& p : testable) {
      auto [it, fresh] = by_margin.emplace(p.frequency(), tables_.size());
      if (fresh) tables_.push_back(std::make_unique<MarginPValues>(p.frequency(), db.n(), db.n_prime(), tail));
      row_table_.push_back(tables_[it->second].get());
    }
  }

  void run(std::vector<double>& out, unsigned threads) const {
    const std::uint64_t h = plan_.iterations;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(h, 1024))));
    auto block = [&](std::uint64_t begin, std::uint64_t end) {
      std::vector<std::uint32_t> counts(matrix_.rows());
      for (std::uint64_t j = begin; j < end; ++j) out[j] = evaluate(j, counts);
    };
    if (threads == 1) return block(0, h);
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(block, h * t / threads, h * (t + 1) / threads);
  }

 private:
  double evaluate(std::uint64_t j, std::vector<std::uint32_t>& counts) const {
    const auto mask = permuted_mask(plan_, j);
    kernels::and_popcount_rows(matrix_.data(), matrix_.rows(), matrix_.words(), mask.words().data(),
                               counts.data());
    double best = 1.0;
    for (std::size_t r = 0; r < counts.size(); ++r) best = std::min(best, (*row_table_[r])(counts[r]));
    return best;
  }

  const PermutationPlan& plan_;
  OccurrenceMatrix matrix_;
  std::vector<std::unique_ptr<MarginPValues>> tables_;
  std::vector<const MarginPValues*> row_table_;
};

}  // namespace

std::vector<double> min_p_distribution(std::span<const Pattern> testable, const PermutationPlan& plan,
                                       const GraphDatabase& db, Tail tail, unsigned threads) {
  const MinPEvaluator eval(testable, plan, db, tail);
  std::vector<double> out(plan.iterations);
  eval.run(out, threads);
  return out;
}

EffectiveTestsResult effective_num_tests(std::vector<double> min_p_samples, double alpha,
                                         std::size_t testable_count) {
  if (min_p_samples.empty()) throw std::invalid_argument("no min-p samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
  std::vector<double> sorted = min_p_samples;
  std::sort(sorted.begin(), sorted.end());
  const auto h = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(alpha * h - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());

  EffectiveTestsResult r;
  r.alpha_prime = sorted[rank - 1];
  if (r.alpha_prime <= 0.0) {
    auto pos = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
    r.alpha_prime = pos != sorted.end() ? *pos : std::numeric_limits<double>::denorm_min();
  }
  r.m_eff_raw = r.alpha_prime >= 1.0 ? 1.0 : std::log1p(-alpha) / std::log1p(-r.alpha_prime);
  const double upper = std::max<double>(1.0, static_cast<double>(testable_count));
  r.m_eff = std::clamp(r.m_eff_raw, 1.0, upper);
  r.min_p_samples = std::move(min_p_samples);
  return r;
}

double empirical_fwer(std::span<const Pattern> testable, double threshold, const PermutationPlan& plan,
                      const GraphDatabase& db, Tail tail, unsigned threads) {
  if (testable.empty() || threshold <= 0.0) return 0.0;
  const auto samples = min_p_distribution(testable, plan, db, tail, threads);
  const auto hits = std::count_if(samples.begin(), samples.end(), [&](double p) { return p < threshold; });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace sigsub
