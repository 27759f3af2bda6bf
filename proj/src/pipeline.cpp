#include "sigsub/pipeline.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "sigsub/permutation.hpp"

namespace sigsub {

std::string_view to_string(CorrectionMode mode) {
  switch (mode) {
    case CorrectionMode::tarone: return "tarone";
    case CorrectionMode::bonferroni_full: return "bonferroni-full";
    case CorrectionMode::efftests: return "efftests";
  }
  return "?";
}

std::optional<CorrectionMode> parse_correction(std::string_view text) {
  if (text == "tarone") return CorrectionMode::tarone;
  if (text == "bonferroni-full") return CorrectionMode::bonferroni_full;
  if (text == "efftests") return CorrectionMode::efftests;
  return std::nullopt;
}

std::string_view to_string(ReportFormat format) { return format == ReportFormat::csv ? "csv" : "json"; }

std::optional<ReportFormat> parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  return std::nullopt;
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::no_testable_subgraphs: return "no_testable_subgraphs";
    case RunStatus::bf_timeout: return "bf_timeout";
  }
  return "?";
}

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (correction == CorrectionMode::efftests && permutations == 0)
    throw std::invalid_argument("efftests needs at least one permutation");
  if (max_vertices && *max_vertices == 0) throw std::invalid_argument("max_vertices must be >= 1 when set");
  if (bf_timeout_seconds && !(*bf_timeout_seconds > 0.0)) throw std::invalid_argument("bf timeout must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

ReportRecord to_record(const SignificanceRecord& r, bool swapped) {
  ReportRecord out;
  out.pattern = r.code;
  out.vertices = r.pattern.vertex_count;
  out.edges = r.pattern.edge_count;
  out.frequency = r.pattern.frequency();
  out.x = swapped ? r.pattern.x_prime : r.pattern.x;
  out.x_prime = swapped ? r.pattern.x : r.pattern.x_prime;
  out.p_value = r.p_value;
  out.min_p = r.min_p;
  out.significant = r.significant;
  return out;
}

// FWER permutations use their own stream so they are not the ones that calibrated α'.
std::uint64_t fwer_seed(std::uint64_t seed) { return stream_seed(seed, std::numeric_limits<std::uint64_t>::max()); }

}  // namespace

SignificanceReport run_pipeline(const GraphDatabase& db, const RunConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const Tail tail = db.swapped() ? mirrored(config.tail) : config.tail;

  SignificanceReport report;
  auto& s = report.summary;
  s.n = db.swapped() ? db.n_prime() : db.n();
  s.n_prime = db.swapped() ? db.n() : db.n_prime();
  s.swapped = db.swapped();
  s.alpha = config.alpha;
  s.tail = config.tail;
  s.correction = config.correction;
  s.strategy = config.strategy;
  s.max_vertices = config.max_vertices;
  s.count_singletons = config.count_singletons;
  s.seed = config.seed;

  SearchOptions options;
  options.alpha = config.alpha;
  options.tail = tail;
  options.max_vertices = config.max_vertices;
  options.count_singletons = config.count_singletons;
  auto root = find_root(db, options, config.strategy);
  for (const auto& t : root.trace) report.trace.push_back({"root", t});
  s.fsm_invocations = root.fsm_invocations;
  s.patterns_expanded = root.patterns_expanded;
  if (root.has_testable_frequency) s.sigma_min = root.sigma_min;
  s.sigma_rt = root.sigma_rt;
  s.testable_count = root.testable.size();
  if (root.testable.empty()) s.status = RunStatus::no_testable_subgraphs;

  std::vector<Pattern> tested;
  double factor = 1.0;
  switch (config.correction) {
    case CorrectionMode::tarone:
      factor = std::max<double>(1.0, static_cast<double>(root.testable.size()));
      tested = std::move(root.testable);
      break;
    case CorrectionMode::efftests:
      if (!root.testable.empty()) {
        const auto plan = PermutationPlan::for_database(db, config.permutations, config.seed);
        auto eff = effective_num_tests(min_p_distribution(root.testable, plan, db, tail, config.threads),
                                       config.alpha, root.testable.size());
        s.m_eff = eff.m_eff;
        s.alpha_prime = eff.alpha_prime;
        s.permutations = config.permutations;
        factor = eff.m_eff;
        report.min_p_samples = std::move(eff.min_p_samples);
      }
      tested = std::move(root.testable);
      break;
    case CorrectionMode::bonferroni_full: {
      MinerConfig bf;
      bf.min_frequency = 2;
      bf.max_vertices = config.max_vertices;
      bf.count_singletons = config.count_singletons;
      MinerControl control;
      if (config.bf_timeout_seconds)
        control.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                              std::chrono::duration<double>(*config.bf_timeout_seconds));
      const auto t0 = Clock::now();
      auto out = mine(db, bf, control);
      MiningTrace entry;
      entry.sigma = 2;
      entry.status = out.status;
      entry.emitted = out.emitted_count;
      entry.millis = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      report.trace.push_back({"bf", entry});
      ++s.fsm_invocations;
      s.patterns_expanded += out.emitted_count;
      if (out.status != MiningStatus::completed) {
        s.status = RunStatus::bf_timeout;
        s.hypothesis_count = out.emitted_count;  // lower bound reached before the deadline
        s.correction_factor = 0.0;
        s.corrected_threshold = 0.0;
        s.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        return report;
      }
      s.status = RunStatus::ok;
      s.hypothesis_count = out.patterns.size();
      factor = std::max<double>(1.0, static_cast<double>(out.patterns.size()));
      tested = std::move(out.patterns);
      break;
    }
  }

  s.correction_factor = factor;
  s.corrected_threshold = config.alpha / factor;
  const auto records = significant_set(tested, db, config.alpha, tail, factor);
  for (const auto& r : records) {
    report.records.push_back(to_record(r, db.swapped()));
    s.significant_count += r.significant;
  }

  if (config.fwer_permutations > 0 && !tested.empty()) {
    const auto plan = PermutationPlan::for_database(db, config.fwer_permutations, fwer_seed(config.seed));
    s.empirical_fwer = empirical_fwer(tested, s.corrected_threshold, plan, db, tail, config.threads);
    s.fwer_permutations = config.fwer_permutations;
  }
  s.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

SignificanceReport run_pipeline(const RunConfig& config) {
  config.validate();
  std::ifstream graphs(config.input);
  if (!graphs) throw IoError("cannot read input file '" + config.input + "'");
  if (config.labels) {
    std::ifstream labels(*config.labels);
    if (!labels) throw IoError("cannot read labels file '" + *config.labels + "'");
    return run_pipeline(parse_database(graphs, &labels), config);
  }
  return run_pipeline(parse_database(graphs, nullptr), config);
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <typename T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json summary_json(const ReportSummary& s, bool include_timing) {
  nlohmann::ordered_json j;
  j["status"] = to_string(s.status);
  j["n"] = s.n;
  j["n_prime"] = s.n_prime;
  j["swapped"] = s.swapped;
  j["alpha"] = s.alpha;
  j["tail"] = to_string(s.tail);
  j["sigma_min"] = opt(s.sigma_min);
  j["sigma_rt"] = s.sigma_rt;
  j["testable_count"] = s.testable_count;
  j["correction"] = to_string(s.correction);
  j["correction_factor"] = s.correction_factor;
  j["corrected_threshold"] = s.corrected_threshold;
  j["hypothesis_count"] = opt(s.hypothesis_count);
  j["m_eff"] = opt(s.m_eff);
  j["alpha_prime"] = opt(s.alpha_prime);
  j["permutations"] = s.permutations;
  j["empirical_fwer"] = opt(s.empirical_fwer);
  j["fwer_permutations"] = s.fwer_permutations;
  j["strategy"] = to_string(s.strategy);
  j["fsm_invocations"] = s.fsm_invocations;
  j["patterns_expanded"] = s.patterns_expanded;
  j["max_vertices"] = opt(s.max_vertices);
  j["count_singletons"] = s.count_singletons;
  j["seed"] = s.seed;
  j["significant_count"] = s.significant_count;
  if (include_timing) j["wall_time_seconds"] = s.wall_time_seconds;
  return j;
}

}  // namespace

void write_report(const SignificanceReport& report, ReportFormat format, std::ostream& out, bool include_timing) {
  if (format == ReportFormat::csv) {
    out << "pattern,vertices,edges,frequency,x,x_prime,p_value,min_p,significant\n";
    for (const auto& r : report.records)
      out << csv_field(r.pattern) << ',' << r.vertices << ',' << r.edges << ',' << r.frequency << ',' << r.x << ','
          << r.x_prime << ',' << fmt17(r.p_value) << ',' << fmt17(r.min_p) << ','
          << (r.significant ? "true" : "false") << '\n';
  } else {
    nlohmann::ordered_json j;
    j["summary"] = summary_json(report.summary, include_timing);
    auto& records = j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : report.records)
      records.push_back({{"pattern", r.pattern},
                         {"vertices", r.vertices},
                         {"edges", r.edges},
                         {"frequency", r.frequency},
                         {"x", r.x},
                         {"x_prime", r.x_prime},
                         {"p_value", r.p_value},
                         {"min_p", r.min_p},
                         {"significant", r.significant}});
    out << j.dump(2) << '\n';
  }
  if (!out) throw IoError("failed to write report");
}

void write_trace(const SignificanceReport& report, std::ostream& out) {
  out << "phase\tsigma\tbudget\tstatus\temitted\tmillis\n";
  for (const auto& t : report.trace) {
    out << t.phase << '\t' << t.entry.sigma << '\t';
    if (t.entry.budget) out << *t.entry.budget;
    else out << '-';
    out << '\t' << to_string(t.entry.status) << '\t' << t.entry.emitted << '\t' << fmt17(t.entry.millis) << '\n';
  }
}

void write_summary_text(const ReportSummary& s, std::ostream& out) {
  out << "status=" << to_string(s.status) << '\n'
      << "n=" << s.n << " n_prime=" << s.n_prime << (s.swapped ? " (classes swapped internally)" : "") << '\n'
      << "sigma_min=" << (s.sigma_min ? std::to_string(*s.sigma_min) : "none") << " sigma_rt=" << s.sigma_rt
      << " testable=" << s.testable_count << '\n'
      << "correction=" << to_string(s.correction) << " factor=" << fmt17(s.correction_factor)
      << " threshold=" << fmt17(s.corrected_threshold) << '\n';
  if (s.hypothesis_count) out << "hypotheses(f>=2)=" << *s.hypothesis_count << '\n';
  if (s.m_eff) out << "m_eff=" << fmt17(*s.m_eff) << " alpha_prime=" << fmt17(*s.alpha_prime) << '\n';
  if (s.empirical_fwer) out << "empirical_fwer=" << fmt17(*s.empirical_fwer) << " over " << s.fwer_permutations << '\n';
  out << "significant=" << s.significant_count << " strategy=" << to_string(s.strategy)
      << " fsm_invocations=" << s.fsm_invocations << " patterns_expanded=" << s.patterns_expanded
      << " wall_time=" << fmt17(s.wall_time_seconds) << "s\n";
}

}  // namespace sigsub
