#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "sigsub/errors.hpp"
#include "sigsub/kernels.hpp"
#include "sigsub/permutation.hpp"
#include "sigsub/tarone.hpp"

using namespace sigsub;

namespace {

OccurrenceBits bits_from(const std::string& s) {
  OccurrenceBits b(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '1') b.set(i);
  return b;
}

// Restores detection when a test forces a kernel variant.
struct IsaGuard {
  ~IsaGuard() { kernels::set_isa_override(std::nullopt); }
};

std::vector<kernels::Isa> available_isas() {
  std::vector<kernels::Isa> out;
  for (auto isa : {kernels::Isa::scalar, kernels::Isa::avx2, kernels::Isa::neon})
    if (kernels::isa_available(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST_SUITE("permutation") {
  TEST_CASE("permuted positive count examples") {
    CHECK(permuted_positive_count(bits_from("1010"), bits_from("0110")) == 1);
    const auto mask = bits_from("110100");
    CHECK(permuted_positive_count(bits_from("111111"), mask) == 3);
    CHECK(permuted_positive_count(bits_from("010100"), mask) == 2);
    CHECK_THROWS_AS(permuted_positive_count(bits_from("101"), bits_from("1010")), std::invalid_argument);
  }

  TEST_CASE("kernel variants agree with a per-bit count") {
    std::mt19937_64 rng(5);
    IsaGuard guard;
    for (std::size_t words : {1, 2, 3, 4, 5, 7, 8, 9, 16, 33}) {
      for (std::size_t rows : {0, 1, 2, 3, 4, 5, 9, 31}) {
        std::vector<std::uint64_t> matrix(rows * words), mask(words);
        for (auto& w : matrix) w = rng();
        for (auto& w : mask) w = rng();
        if (rows > 0) matrix[0] = ~std::uint64_t{0};  // saturated row
        std::vector<std::uint32_t> want(rows);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t w = 0; w < words; ++w)
            for (int b = 0; b < 64; ++b) want[r] += ((matrix[r * words + w] & mask[w]) >> b) & 1U;
        for (auto isa : available_isas()) {
          CAPTURE(kernels::to_string(isa));
          CAPTURE(words);
          CAPTURE(rows);
          std::vector<std::uint32_t> got(rows, 777);
          kernels::and_popcount_rows_for(isa)(matrix.data(), rows, words, mask.data(), got.data());
          CHECK(got == want);
          kernels::set_isa_override(isa);
          std::fill(got.begin(), got.end(), 777);
          kernels::and_popcount_rows(matrix.data(), rows, words, mask.data(), got.data());
          CHECK(got == want);
        }
      }
    }
  }

  TEST_CASE("kernel dispatch") {
    IsaGuard guard;
    CHECK(kernels::isa_available(kernels::Isa::scalar));
    const auto best = kernels::active_isa();
    CHECK(kernels::isa_available(best));
    kernels::set_isa_override(kernels::Isa::scalar);
    CHECK(kernels::active_isa() == kernels::Isa::scalar);
    kernels::set_isa_override(std::nullopt);
    CHECK(kernels::active_isa() == best);
    for (auto isa : {kernels::Isa::avx2, kernels::Isa::neon})
      if (!kernels::isa_available(isa)) CHECK_THROWS_AS(kernels::set_isa_override(isa), std::invalid_argument);
    MESSAGE("active kernel: " << kernels::to_string(best));
  }

  TEST_CASE("permuted masks keep n positives and are reproducible") {
    const PermutationPlan plan{100, 42, 7, 12};
    for (std::uint64_t j = 0; j < plan.iterations; ++j) {
      const auto m = permuted_mask(plan, j);
      CHECK(m.width() == 19);
      CHECK(m.count() == 7);
      CHECK(m == permuted_mask(plan, j));
    }
    CHECK_FALSE(permuted_mask(plan, 0) == permuted_mask({100, 43, 7, 12}, 0));
  }

  TEST_CASE("permutations are uniform over label subsets") {
    // n = 2 of N = 4: six subsets, each with probability 1/6
    const PermutationPlan plan{60000, 9, 2, 2};
    std::map<std::string, int> counts;
    for (std::uint64_t j = 0; j < plan.iterations; ++j) ++counts[permuted_mask(plan, j).to_string()];
    REQUIRE(counts.size() == 6);
    double chi2 = 0.0;
    const double expected = 10000.0;
    for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 20.5);  // 5 d.o.f., p ≈ 0.001
  }

  TEST_CASE("plan validation") {
    CHECK_THROWS_AS(PermutationPlan({0, 1, 2, 2}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(PermutationPlan({5, 1, 0, 2}).validate(), std::invalid_argument);
    CHECK_NOTHROW(PermutationPlan({5, 1, 2, 2}).validate());
  }

  TEST_CASE("min-p matches a from-scratch recount") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 10; ++iter) {
      const auto db = parse_database(testing::random_database_text(rng, {6, 8, 5, 2, 2, 0.5}));
      auto mined = mine(db, {.min_frequency = 1, .max_vertices = 3}).patterns;
      REQUIRE(mined.size() >= 3);
      std::shuffle(mined.begin(), mined.end(), rng);
      mined.resize(3);
      const auto plan = PermutationPlan::for_database(db, 20, 1000 + iter);
      for (Tail tail : {Tail::two, Tail::left, Tail::right}) {
        const auto samples = min_p_distribution(mined, plan, db, tail);
        REQUIRE(samples.size() == 20);
        for (std::uint64_t j = 0; j < plan.iterations; ++j) {
          const auto mask = permuted_mask(plan, j);
          double best = 1.0;
          for (const auto& p : mined) {
            const auto g = pattern_graph(p);
            std::uint32_t x = 0, f = 0;
            for (std::size_t i = 0; i < db.size(); ++i)
              if (contains(db.graph(i), g)) {
                ++f;
                x += mask.test(i);
              }
            CHECK(f == p.frequency());  // label invariance
            best = std::min(best, fisher_pvalue({x, f - x, db.n(), db.n_prime()}, tail).p_value());
          }
          CHECK(samples[j] == best);
        }
      }
    }
  }

  TEST_CASE("pattern in every graph has a constant minimum") {
    std::ostringstream text;
    for (int g = 0; g < 9; ++g) text << "t # " << g << ' ' << (g < 4) << "\nv 0 A\nv 1 L" << g << "\ne 0 1 x\n";
    const auto db = parse_database(text.str());
    const auto out = mine(db, {.min_frequency = 9});
    REQUIRE(out.patterns.size() == 1);
    const auto samples = min_p_distribution(out.patterns, PermutationPlan::for_database(db, 50, 3), db, Tail::two);
    const double p = fisher_pvalue({4, 5, 4, 5}, Tail::two).p_value();
    for (double s : samples) CHECK(s == p);
  }

  TEST_CASE("reproducible regardless of thread count") {
    std::mt19937_64 rng(8);
    const auto db = parse_database(testing::random_database_text(rng, {30, 30, 6, 3, 2, 0.4}));
    const auto patterns = mine(db, {.min_frequency = 3, .max_vertices = 3}).patterns;
    const auto plan = PermutationPlan::for_database(db, 257, 77);
    const auto one = min_p_distribution(patterns, plan, db, Tail::two, 1);
    CHECK(min_p_distribution(patterns, plan, db, Tail::two, 1) == one);
    CHECK(min_p_distribution(patterns, plan, db, Tail::two, 4) == one);
    CHECK(min_p_distribution(patterns, plan, db, Tail::two, 64) == one);
    const auto single = PermutationPlan::for_database(db, 1, 77);
    CHECK(min_p_distribution(patterns, single, db, Tail::two) ==
          min_p_distribution(patterns, single, db, Tail::two));
  }

  TEST_CASE("empty testable set is signalled") {
    const auto db = parse_database("t # 0 1\nv 0 A\nt # 1 0\nv 0 B\n");
    CHECK_THROWS_AS(min_p_distribution({}, PermutationPlan::for_database(db, 5, 1), db, Tail::two), NoTestableError);
    CHECK(empirical_fwer({}, 0.05, PermutationPlan::for_database(db, 5, 1), db, Tail::two) == 0.0);
  }

  TEST_CASE("effective number of tests") {
    const double alpha = 0.05;
    std::vector<double> samples(1000, 0.5);
    CHECK(effective_num_tests(std::vector<double>(1000, alpha), alpha, 100).m_eff == doctest::Approx(1.0));
    for (double m : {1.0, 2.0, 7.0, 40.0, 250.0}) {
      const double ap = 1.0 - std::pow(1.0 - alpha, 1.0 / m);
      CHECK(effective_num_tests(std::vector<double>(10, ap), alpha, 1000).m_eff == doctest::Approx(m).epsilon(1e-9));
    }
    // 50th smallest of 1000 at 0.005
    for (int i = 0; i < 49; ++i) samples[i] = 0.001;
    samples[49] = 0.005;
    std::shuffle(samples.begin(), samples.end(), std::mt19937_64(1));
    const auto r = effective_num_tests(samples, alpha, 100);
    CHECK(r.alpha_prime == 0.005);
    CHECK(r.m_eff == doctest::Approx(std::log(0.95) / std::log(0.995)));
    CHECK(r.m_eff == doctest::Approx(10.23).epsilon(1e-3));
    CHECK(r.min_p_samples == samples);

    CHECK(effective_num_tests(samples, alpha, 4).m_eff == 4.0);  // clamped to |τ|
    CHECK(effective_num_tests(std::vector<double>(20, 1.0), alpha, 9).m_eff == 1.0);
    const auto zeros = effective_num_tests({0.0, 0.0, 0.0, 0.2}, 0.5, 1000);
    CHECK(zeros.alpha_prime == 0.2);
    CHECK_THROWS_AS(effective_num_tests({}, alpha, 3), std::invalid_argument);
    CHECK_THROWS_AS(effective_num_tests({0.1}, 1.0, 3), std::domain_error);
  }

  TEST_CASE("empirical FWER boundaries") {
    std::mt19937_64 rng(12);
    const auto db = parse_database(testing::random_database_text(rng, {12, 12, 5, 2, 2, 0.5}));
    const auto patterns = mine(db, {.min_frequency = 2, .max_vertices = 2}).patterns;
    REQUIRE_FALSE(patterns.empty());
    const auto plan = PermutationPlan::for_database(db, 200, 4);
    CHECK(empirical_fwer(patterns, 0.0, plan, db, Tail::two) == 0.0);
    CHECK(empirical_fwer(patterns, 1.0 + 1e-9, plan, db, Tail::two) == 1.0);

    const Pattern& one = patterns.front();
    const double psi = min_attainable_pvalue(one.frequency(), db.n(), db.n_prime(), Tail::right);
    CHECK(empirical_fwer(std::span(&one, 1), psi, plan, db, Tail::right) == 0.0);
  }

  TEST_CASE("testable set is label invariant") {
    std::mt19937_64 rng(21);
    const auto db = parse_database(testing::random_database_text(rng, {12, 12, 5, 2, 2, 0.5}));
    const auto base = find_root_one_pass(db, {});
    const auto plan = PermutationPlan::for_database(db, 5, 6);
    for (std::uint64_t j = 0; j < plan.iterations; ++j) {
      const auto mask = permuted_mask(plan, j);
      std::vector<int> classes;
      for (std::size_t i = 0; i < db.size(); ++i) classes.push_back(mask.test(i) ? 1 : 0);
      std::vector<LabeledGraph> graphs(db.graphs().begin(), db.graphs().end());
      const GraphDatabase permuted(graphs, classes, db.vertex_symbols(), db.edge_symbols());
      const auto r = find_root_one_pass(permuted, {});
      CHECK(r.sigma_rt == base.sigma_rt);
      CHECK(r.testable.size() == base.testable.size());
    }
  }
}
