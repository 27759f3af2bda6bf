#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigsub/errors.hpp"
#include "sigsub/exact_test.hpp"
#include "sigsub/graph.hpp"
#include "sigsub/tarone.hpp"

namespace sigsub {

enum class CorrectionMode { tarone, bonferroni_full, efftests };
enum class ReportFormat { csv, json };

std::string_view to_string(CorrectionMode mode);
/// CLI spellings: tarone, bonferroni-full, efftests.
std::optional<CorrectionMode> parse_correction(std::string_view text);
std::string_view to_string(ReportFormat format);
std::optional<ReportFormat> parse_format(std::string_view text);

struct RunConfig {
  std::string input;
  std::optional<std::string> labels;
  double alpha = 0.05;
  Tail tail = Tail::two;  // relative to user class 1
  SearchStrategy strategy = SearchStrategy::incremental;
  std::optional<std::uint32_t> max_vertices;
  CorrectionMode correction = CorrectionMode::tarone;
  std::uint64_t permutations = 1000;
  std::uint64_t fwer_permutations = 0;  // 0: no FWER estimate
  std::uint64_t seed = 0;
  bool count_singletons = true;
  unsigned threads = 1;
  std::optional<double> bf_timeout_seconds;

  /// Throws std::invalid_argument on an out-of-range field.
  void validate() const;
};

/// One tested pattern, x/x_prime counted in the user's class 1 / class 0.
struct ReportRecord {
  std::string pattern;
  std::uint32_t vertices = 0;
  std::uint32_t edges = 0;
  std::uint32_t frequency = 0;
  std::uint32_t x = 0;
  std::uint32_t x_prime = 0;
  double p_value = 1.0;
  double min_p = 1.0;
  bool significant = false;
};

enum class RunStatus { ok, no_testable_subgraphs, bf_timeout };
std::string_view to_string(RunStatus status);

struct ReportSummary {
  RunStatus status = RunStatus::ok;
  std::uint32_t n = 0;        // graphs in user class 1
  std::uint32_t n_prime = 0;  // graphs in user class 0
  bool swapped = false;
  double alpha = 0.05;
  Tail tail = Tail::two;
  std::optional<std::uint32_t> sigma_min;
  std::uint32_t sigma_rt = 0;
  std::uint64_t testable_count = 0;
  CorrectionMode correction = CorrectionMode::tarone;
  double correction_factor = 1.0;
  double corrected_threshold = 0.05;
  std::optional<std::uint64_t> hypothesis_count;  // |ℋ| at σ = 2, bonferroni-full only
  std::optional<double> m_eff;
  std::optional<double> alpha_prime;
  std::uint64_t permutations = 0;
  std::optional<double> empirical_fwer;
  std::uint64_t fwer_permutations = 0;
  SearchStrategy strategy = SearchStrategy::incremental;
  std::uint64_t fsm_invocations = 0;
  std::uint64_t patterns_expanded = 0;
  std::optional<std::uint32_t> max_vertices;
  bool count_singletons = true;
  std::uint64_t seed = 0;
  std::uint64_t significant_count = 0;
  double wall_time_seconds = 0.0;
};

struct TraceLine {
  std::string phase;  // "root" or "bf"
  MiningTrace entry;
};

struct SignificanceReport {
  ReportSummary summary;
  std::vector<ReportRecord> records;
  std::vector<TraceLine> trace;
  std::vector<double> min_p_samples;  // efftests only
};

/// parse -> root search -> correction factor -> significance testing.
SignificanceReport run_pipeline(const GraphDatabase& db, const RunConfig& config);
/// Reads config.input (and config.labels). Throws IoError, ParseError, LabelError, ValidityError.
SignificanceReport run_pipeline(const RunConfig& config);

/// CSV: header plus one row per record. JSON: {"summary": {...}, "records": [...]}. Wall time is
/// written only with `include_timing` so that repeated runs give identical bytes.
void write_report(const SignificanceReport& report, ReportFormat format, std::ostream& out,
                  bool include_timing = false);

/// Tab-separated: phase, sigma, budget, status, emitted, millis.
void write_trace(const SignificanceReport& report, std::ostream& out);

/// Human-readable key=value lines.
void write_summary_text(const ReportSummary& summary, std::ostream& out);

}  // namespace sigsub
