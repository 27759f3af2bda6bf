// sigsub: significant subgraph mining from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 timeout.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "sigsub/errors.hpp"
#include "sigsub/kernels.hpp"
#include "sigsub/pipeline.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kTimeout = 3;

std::unique_ptr<std::ostream> open_sink(const std::string& path) {
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*out) throw sigsub::IoError("cannot write '" + path + "'");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Find subgraphs significantly enriched in one class of a two-class graph database"};
  app.option_defaults()->always_capture_default();

  sigsub::RunConfig config;
  std::string tail = "two", strategy = "incremental", correction = "tarone", format = "csv";
  std::string count_singletons = "on";
  std::uint32_t max_vertices = 0;
  std::string output, trace_target, dump_min_p;
  std::string fwer_text;
  double bf_timeout = 0.0;
  bool timing = false;

  app.add_option("--input", config.input, "Graph transaction file")->required();
  auto* labels = app.add_option("--labels", "Class labels file: '<graph_id> <class>' per line");
  app.add_option("--alpha", config.alpha, "Family-wise significance level")->check(CLI::Range(0.0, 1.0));
  app.add_option("--tail", tail, "Tail of Fisher's exact test, relative to class 1")
      ->check(CLI::IsMember({"two", "left", "right"}));
  app.add_option("--strategy", strategy, "Root-frequency search")
      ->check(CLI::IsMember({"onepass", "decremental", "incremental", "bisection"}));
  app.add_option("--max-vertices", max_vertices, "Largest pattern size in vertices, 0 = unlimited");
  app.add_option("--correction", correction, "Multiple-testing correction")
      ->check(CLI::IsMember({"tarone", "bonferroni-full", "efftests"}));
  app.add_option("--permutations", config.permutations, "Permutations for efftests")->check(CLI::PositiveNumber);
  auto* fwer = app.add_option("--fwer-permutations", fwer_text,
                              "Estimate the empirical FWER (10000 permutations when no value is given)")
                   ->expected(0, 1)
                   ->check(CLI::Validator(
                       [](std::string& v) {
                         const bool digits = v.find_first_not_of("0123456789") == std::string::npos;
                         return digits && v.size() < 19 ? std::string() : "expected a non-negative integer";
                       },
                       "UINT"));
  app.add_option("--seed", config.seed, "Permutation seed");
  app.add_option("--output", output, "Report path (default: stdout)");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  auto* trace = app.add_option("--trace", trace_target, "Write the FSM trace (stderr when no path is given)")
                    ->expected(0, 1);
  app.add_option("--count-singletons", count_singletons, "Count single-vertex patterns")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--threads", config.threads, "Worker threads for permutations")->check(CLI::PositiveNumber);
  auto* bf = app.add_option("--bf-timeout", bf_timeout, "Seconds allowed for the bonferroni-full enumeration")
                 ->check(CLI::PositiveNumber);
  app.add_option("--dump-min-p", dump_min_p, "Write the permutation min-p samples, one per line");
  app.add_flag("--timing", timing, "Include wall time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  if (labels->count() > 0) config.labels = labels->as<std::string>();
  config.tail = *sigsub::parse_tail(tail);
  config.strategy = *sigsub::parse_strategy(strategy);
  config.correction = *sigsub::parse_correction(correction);
  if (max_vertices > 0) config.max_vertices = max_vertices;
  config.count_singletons = count_singletons == "on";
  if (fwer->count() > 0) config.fwer_permutations = fwer_text.empty() ? 10000 : std::stoull(fwer_text);
  if (bf->count() > 0) config.bf_timeout_seconds = bf_timeout;
  const auto report_format = *sigsub::parse_format(format);

  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    const auto report = sigsub::run_pipeline(config);

    if (output.empty()) {
      sigsub::write_report(report, report_format, std::cout, timing);
    } else {
      auto sink = open_sink(output);
      sigsub::write_report(report, report_format, *sink, timing);
    }
    if (trace->count() > 0) {
      if (trace_target.empty()) {
        sigsub::write_trace(report, std::cerr);
      } else {
        auto sink = open_sink(trace_target);
        sigsub::write_trace(report, *sink);
      }
    }
    if (!dump_min_p.empty()) {
      auto sink = open_sink(dump_min_p);
      *sink << std::setprecision(17);
      for (double p : report.min_p_samples) *sink << p << '\n';
    }
    sigsub::write_summary_text(report.summary, std::cerr);
    std::cerr << "kernel=" << sigsub::kernels::to_string(sigsub::kernels::active_isa()) << '\n';
    return report.summary.status == sigsub::RunStatus::bf_timeout ? kTimeout : 0;
  } catch (const sigsub::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const sigsub::LabelError& e) {
    std::cerr << "label error: " << e.what() << '\n';
  } catch (const sigsub::ValidityError& e) {
    std::cerr << "invalid database: " << e.what() << '\n';
  } catch (const sigsub::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
  }
  return kInput;
}
