#include "sigsub/tarone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigsub {

std::string_view to_string(SearchStrategy strategy) {
  switch (strategy) {
    case SearchStrategy::one_pass: return "onepass";
    case SearchStrategy::decremental: return "decremental";
    case SearchStrategy::incremental: return "incremental";
    case SearchStrategy::bisection: return "bisection";
  }
  return "?";
}

std::optional<SearchStrategy> parse_strategy(std::string_view text) {
  if (text == "onepass") return SearchStrategy::one_pass;
  if (text == "decremental") return SearchStrategy::decremental;
  if (text == "incremental") return SearchStrategy::incremental;
  if (text == "bisection") return SearchStrategy::bisection;
  return std::nullopt;
}

TestabilityBound::TestabilityBound(double alpha, std::uint32_t n, std::uint32_t n_prime, Tail tail)
    : alpha_(alpha), n_(n), n_prime_(n_prime), tail_(tail) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
}

std::uint64_t TestabilityBound::budget(std::uint32_t sigma) const {
  const double ratio = std::floor(alpha_ / psi(sigma));
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  if (!(ratio < static_cast<double>(cap))) return cap;
  return static_cast<std::uint64_t>(ratio);
}

std::uint64_t count_m_of_k(std::span<const std::uint32_t> frequencies, double k, double alpha, std::uint32_t n,
                           std::uint32_t n_prime, Tail tail) {
  if (!(k > 0.0)) throw std::domain_error("k must be positive");
  const double limit = alpha / k * (1.0 + 1e-12);
  std::uint64_t m = 0;
  for (auto f : frequencies)
    if (min_attainable_pvalue(f, n, n_prime, tail) <= limit) ++m;
  return m;
}

namespace {

using Clock = std::chrono::steady_clock;

class Search {
 public:
  Search(const GraphDatabase& db, const SearchOptions& options)
      : db_(db), options_(options), bound_(options.alpha, db.n(), db.n_prime(), options.tail),
        start_(Clock::now()) {
    const auto sigma_min = min_testable_frequency(options.alpha, db.n(), db.n_prime(), options.tail,
                                                  options.comparison);
    result_.has_testable_frequency = sigma_min.has_value();
    result_.sigma_min = sigma_min.value_or(0);
    result_.sigma_rt = result_.sigma_min;
  }

  bool testable() const { return result_.has_testable_frequency; }
  std::uint32_t sigma_min() const { return result_.sigma_min; }
  std::uint32_t n() const { return db_.n(); }
  /// Beyond every frequency: mining here yields nothing.
  std::uint32_t ceiling() const { return static_cast<std::uint32_t>(db_.size()) + 1; }
  const TestabilityBound& bound() const { return bound_; }

  /// Runs the miner at `sigma`, optionally with the Tarone budget. Returns nullopt on cancel.
  std::optional<MiningOutcome> mine_at(std::uint32_t sigma, bool budgeted) {
    MinerConfig config;
    config.min_frequency = sigma;
    config.max_vertices = options_.max_vertices;
    config.count_singletons = options_.count_singletons;
    MiningTrace entry;
    entry.sigma = sigma;
    if (budgeted) {
      const auto b = bound_.budget(sigma);
      entry.budget = b;
      if (b != std::numeric_limits<std::uint64_t>::max()) config.pattern_budget = b;
    }
    const auto t0 = Clock::now();
    auto outcome = mine(db_, config, options_.control);
    entry.millis = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    entry.status = outcome.status;
    entry.emitted = outcome.emitted_count;
    result_.trace.push_back(entry);
    ++result_.fsm_invocations;
    result_.patterns_expanded += outcome.emitted_count;
    if (outcome.status == MiningStatus::cancelled) {
      result_.cancelled = true;
      return std::nullopt;
    }
    return outcome;
  }

  RootSearchResult finish(std::uint32_t sigma_rt, std::vector<Pattern> testable) {
    result_.sigma_rt = sigma_rt;
    result_.k_rt = options_.alpha / bound_.psi(sigma_rt);
    result_.testable = std::move(testable);
    return done();
  }

  RootSearchResult done() {
    result_.wall_time = Clock::now() - start_;
    return std::move(result_);
  }

 private:
  const GraphDatabase& db_;
  const SearchOptions& options_;
  TestabilityBound bound_;
  Clock::time_point start_;
  RootSearchResult result_;
};

bool admitted(const Search& s, const MiningOutcome& out, std::uint32_t sigma) {
  return out.status == MiningStatus::completed && s.bound().admits(out.patterns.size(), sigma);
}

}  // namespace

RootSearchResult find_root_one_pass(const GraphDatabase& db, const SearchOptions& options) {
  Search s(db, options);
  if (!s.testable()) return s.done();
  auto out = s.mine_at(s.sigma_min(), false);
  if (!out) return s.done();

  // at_least[σ] = |{H : f(H) >= σ}|
  std::vector<std::uint64_t> at_least(s.ceiling() + 1, 0);
  for (const auto& p : out->patterns) ++at_least[p.frequency()];
  for (std::size_t f = at_least.size() - 1; f-- > 0;) at_least[f] += at_least[f + 1];

  std::uint32_t sigma = s.sigma_min();
  while (!s.bound().admits(at_least[sigma], sigma)) ++sigma;

  std::vector<Pattern> testable;
  testable.reserve(at_least[sigma]);
  for (auto& p : out->patterns)
    if (p.frequency() >= sigma) testable.push_back(std::move(p));
  return s.finish(sigma, std::move(testable));
}

RootSearchResult find_root_decremental(const GraphDatabase& db, const SearchOptions& options) {
  Search s(db, options);
  if (!s.testable()) return s.done();

  std::uint32_t sigma = s.n();
  auto out = s.mine_at(sigma, false);
  if (!out) return s.done();

  if (!admitted(s, *out, sigma)) {
    // root lies above n
    do {
      ++sigma;
      out = s.mine_at(sigma, false);
      if (!out) return s.done();
    } while (!admitted(s, *out, sigma));
    return s.finish(sigma, std::move(out->patterns));
  }

  std::vector<Pattern> best = std::move(out->patterns);
  while (sigma > s.sigma_min()) {
    out = s.mine_at(sigma - 1, false);
    if (!out) return s.done();
    if (!admitted(s, *out, sigma - 1)) break;
    --sigma;
    best = std::move(out->patterns);
  }
  return s.finish(sigma, std::move(best));
}

RootSearchResult find_root_incremental(const GraphDatabase& db, const SearchOptions& options) {
  Search s(db, options);
  if (!s.testable()) return s.done();
  for (std::uint32_t sigma = s.sigma_min();; ++sigma) {
    auto out = s.mine_at(sigma, true);
    if (!out) return s.done();
    if (out->status == MiningStatus::completed) return s.finish(sigma, std::move(out->patterns));
  }
}

RootSearchResult find_root_bisection(const GraphDatabase& db, const SearchOptions& options) {
  Search s(db, options);
  if (!s.testable()) return s.done();

  // Invariant once probed: lo fails, hi passes. `best` holds the patterns of the passing hi.
  std::uint32_t lo = s.sigma_min();
  std::uint32_t hi = s.n();
  bool lo_probed = false;
  bool hi_probed = false;
  std::vector<Pattern> best;

  auto bisect = [&]() -> bool {
    while (hi - lo > 1) {
      const std::uint32_t mid = lo + (hi - lo) / 2;
      auto out = s.mine_at(mid, true);
      if (!out) return false;
      if (out->status == MiningStatus::completed) {
        hi = mid;
        hi_probed = true;
        best = std::move(out->patterns);
      } else {
        lo = mid;
        lo_probed = true;
      }
    }
    return true;
  };

  if (!bisect()) return s.done();

  if (!lo_probed) {
    auto out = s.mine_at(lo, true);
    if (!out) return s.done();
    if (out->status == MiningStatus::completed) return s.finish(lo, std::move(out->patterns));
    lo_probed = true;
  }
  if (hi_probed) return s.finish(hi, std::move(best));

  if (hi != lo) {
    auto out = s.mine_at(hi, true);
    if (!out) return s.done();
    if (out->status == MiningStatus::completed) return s.finish(hi, std::move(out->patterns));
    lo = hi;
  }

  // root lies above n; the ceiling passes trivially with no patterns
  hi = s.ceiling();
  best.clear();
  if (!bisect()) return s.done();
  return s.finish(hi, std::move(best));
}

RootSearchResult find_root(const GraphDatabase& db, const SearchOptions& options, SearchStrategy strategy) {
  switch (strategy) {
    case SearchStrategy::one_pass: return find_root_one_pass(db, options);
    case SearchStrategy::decremental: return find_root_decremental(db, options);
    case SearchStrategy::incremental: return find_root_incremental(db, options);
    case SearchStrategy::bisection: return find_root_bisection(db, options);
  }
  throw std::invalid_argument("unknown search strategy");
}

std::vector<SignificanceRecord> significant_set(std::span<const Pattern> testable, const GraphDatabase& db,
                                                double alpha, Tail tail, double correction_factor) {
  if (!(correction_factor >= 1.0)) throw std::invalid_argument("correction factor must be >= 1");
  const double threshold = alpha / correction_factor;
  std::vector<SignificanceRecord> records;
  records.reserve(testable.size());
  for (const auto& p : testable) {
    SignificanceRecord r;
    r.pattern = p;
    r.code = code_string(p, db);
    r.p_value = fisher_pvalue({p.x, p.x_prime, db.n(), db.n_prime()}, tail).p_value();
    r.min_p = min_attainable_pvalue(p.frequency(), db.n(), db.n_prime(), tail);
    r.corrected_threshold = threshold;
    r.significant = r.p_value < threshold;
    records.push_back(std::move(r));
  }
  std::sort(records.begin(), records.end(), [](const SignificanceRecord& a, const SignificanceRecord& b) {
    return a.p_value != b.p_value ? a.p_value < b.p_value : a.code < b.code;
  });
  return records;
}

}  // namespace sigsub
