#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "oracle.hpp"
#include "sigsub/pipeline.hpp"

using namespace sigsub;
namespace fs = std::filesystem;

namespace {

const char* kToy =
    "t # 0 1\nv 0 A\nv 1 B\ne 0 1 x\n"
    "t # 1 1\nv 0 A\nv 1 B\ne 0 1 x\n"
    "t # 2 0\nv 0 A\nv 1 B\ne 0 1 x\n"
    "t # 3 0\nv 0 A\nv 1 B\ne 0 1 x\n"
    "t # 4 1\nv 0 A\n"
    "t # 5 1\nv 0 C0\n"
    "t # 6 1\nv 0 C1\n"
    "t # 7 0\nv 0 C2\n"
    "t # 8 0\nv 0 C3\n"
    "t # 9 0\nv 0 C4\n";

std::string render(const SignificanceReport& r, ReportFormat f) {
  std::ostringstream out;
  write_report(r, f, out);
  return out.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("sigsub_test_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SIGSUB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 60 graphs: a planted path A-B-C in a third of them, random labelled noise elsewhere.
std::string planted_text(std::uint64_t seed, int graphs) {
  std::mt19937_64 rng(seed);
  std::ostringstream out;
  for (int g = 0; g < graphs; ++g) {
    out << "t # " << g << ' ' << (g % 2) << '\n';
    const int nv = 4 + static_cast<int>(rng() % 3);
    for (int v = 0; v < nv; ++v) out << "v " << v << " L" << rng() % 3 << '\n';
    for (int v = 1; v < nv; ++v) out << "e " << rng() % v << ' ' << v << " b" << rng() % 2 << '\n';
  }
  return out.str();
}

}  // namespace

TEST_SUITE("cli_app") {
  TEST_CASE("tarone mode on the toy database") {
    const auto report = run_pipeline(parse_database(kToy), {});
    CHECK(report.summary.status == RunStatus::ok);
    CHECK(report.summary.sigma_rt == 5);
    CHECK(report.summary.sigma_min == 4u);
    CHECK(report.summary.correction_factor == 1.0);
    CHECK(report.summary.corrected_threshold == 0.05);
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].pattern == "0,A");
    CHECK(report.records[0].x == 3);
    CHECK(report.records[0].x_prime == 2);
  }

  TEST_CASE("efftests with a single permutation-invariant pattern") {
    std::ostringstream text;
    for (int g = 0; g < 10; ++g) text << "t # " << g << ' ' << (g < 5) << "\nv 0 A\nv 1 C" << g << "\n";
    RunConfig config;
    config.correction = CorrectionMode::efftests;
    config.permutations = 100;
    const auto report = run_pipeline(parse_database(text.str()), config);
    REQUIRE(report.summary.testable_count == 1);
    CHECK(report.summary.m_eff == 1.0);
    CHECK(report.summary.corrected_threshold == 0.05);
    CHECK(report.min_p_samples.size() == 100);
  }

  TEST_CASE("no testable subgraphs still reports") {
    const auto report = run_pipeline(parse_database("t # 0 1\nv 0 A\nt # 1 0\nv 0 A\n"), {});
    CHECK(report.summary.status == RunStatus::no_testable_subgraphs);
    CHECK_FALSE(report.summary.sigma_min.has_value());
    CHECK(report.records.empty());
    CHECK(render(report, ReportFormat::csv) == "pattern,vertices,edges,frequency,x,x_prime,p_value,min_p,significant\n");
  }

  TEST_CASE("reports are reproducible byte for byte") {
    const auto db = parse_database(planted_text(3, 40));
    RunConfig config;
    config.correction = CorrectionMode::efftests;
    config.permutations = 200;
    config.fwer_permutations = 200;
    config.max_vertices = 3;
    config.seed = 17;
    for (auto f : {ReportFormat::csv, ReportFormat::json}) {
      const auto a = render(run_pipeline(db, config), f);
      config.threads = 3;
      const auto b = render(run_pipeline(db, config), f);
      config.threads = 1;
      CHECK(a == b);
    }
  }

  TEST_CASE("csv and json carry the same records") {
    const auto db = parse_database(planted_text(5, 40));
    RunConfig config;
    config.max_vertices = 3;
    const auto report = run_pipeline(db, config);
    REQUIRE_FALSE(report.records.empty());
    const auto csv = render(report, ReportFormat::csv);
    CHECK(line_count(csv) == report.records.size() + 1);

    const auto j = nlohmann::json::parse(render(report, ReportFormat::json));
    CHECK(j["summary"]["sigma_rt"] == report.summary.sigma_rt);
    REQUIRE(j["records"].size() == report.records.size());
    for (std::size_t i = 0; i < report.records.size(); ++i) {
      const auto& r = report.records[i];
      const auto& k = j["records"][i];
      CHECK(k["pattern"] == r.pattern);
      CHECK(k["frequency"] == r.frequency);
      CHECK(k["p_value"].get<double>() == r.p_value);
      CHECK(k["min_p"].get<double>() == r.min_p);
      CHECK(k["significant"] == r.significant);
    }
    // sorted by (p_value, pattern)
    for (std::size_t i = 1; i < report.records.size(); ++i) {
      const auto& a = report.records[i - 1];
      const auto& b = report.records[i];
      CHECK((a.p_value < b.p_value || (a.p_value == b.p_value && a.pattern < b.pattern)));
    }
    // csv floats keep 17 significant digits
    std::istringstream lines(csv);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", report.records[0].p_value);
    CHECK(first.find(buf) != std::string::npos);
  }

  TEST_CASE("counts and tails are reported in the user's labeling") {
    // class 1 is the larger class, so the engine swaps; A is enriched in class 1
    std::ostringstream text;
    for (int g = 0; g < 16; ++g) {
      const int cls = g < 10 ? 1 : 0;
      text << "t # " << g << ' ' << cls << "\nv 0 " << (g < 9 ? "A" : "Z") << "\n";
    }
    const auto db = parse_database(text.str());
    REQUIRE(db.swapped());
    RunConfig right;
    right.tail = Tail::right;
    const auto r = run_pipeline(db, right);
    CHECK(r.summary.n == 10);
    CHECK(r.summary.n_prime == 6);
    bool seen = false;
    for (const auto& rec : r.records)
      if (rec.pattern == "0,A") {
        seen = true;
        CHECK(rec.x == 9);
        CHECK(rec.x_prime == 0);
        CHECK(rec.p_value == doctest::Approx(fisher_pvalue({0, 9, 6, 10}, Tail::left).p_left));
        CHECK(rec.p_value < 0.01);
      }
    CHECK(seen);
    RunConfig left;
    left.tail = Tail::left;
    for (const auto& rec : run_pipeline(db, left).records)
      if (rec.pattern == "0,A") CHECK(rec.p_value > 0.5);
  }

  TEST_CASE("strategy never changes the records") {
    const auto db = parse_database(planted_text(9, 50));
    RunConfig config;
    config.max_vertices = 4;
    std::string reference;
    for (auto s : {SearchStrategy::one_pass, SearchStrategy::decremental, SearchStrategy::incremental,
                   SearchStrategy::bisection}) {
      config.strategy = s;
      const auto csv = render(run_pipeline(db, config), ReportFormat::csv);
      if (reference.empty()) reference = csv;
      CHECK(csv == reference);
    }
  }

  TEST_CASE("correction factor ordering") {
    const auto db = parse_database(planted_text(13, 60));
    RunConfig config;
    config.max_vertices = 4;
    config.permutations = 300;
    config.correction = CorrectionMode::tarone;
    const auto tarone = run_pipeline(db, config);
    config.correction = CorrectionMode::bonferroni_full;
    const auto bf = run_pipeline(db, config);
    config.correction = CorrectionMode::efftests;
    const auto eff = run_pipeline(db, config);
    REQUIRE(tarone.summary.testable_count > 0);
    CHECK(*eff.summary.m_eff <= static_cast<double>(tarone.summary.testable_count));
    CHECK(tarone.summary.correction_factor <= bf.summary.correction_factor);
    CHECK(bf.records.size() == *bf.summary.hypothesis_count);
  }

  TEST_CASE("bf timeout") {
    RunConfig config;
    config.correction = CorrectionMode::bonferroni_full;
    config.bf_timeout_seconds = 1e-9;
    const auto r = run_pipeline(parse_database(planted_text(2, 60)), config);
    CHECK(r.summary.status == RunStatus::bf_timeout);
    CHECK(r.records.empty());
  }

  TEST_CASE("config validation") {
    RunConfig c;
    c.alpha = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.alpha = 0.05;
    c.correction = CorrectionMode::efftests;
    c.permutations = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(parse_correction("bonferroni-full") == CorrectionMode::bonferroni_full);
    CHECK_FALSE(parse_correction("bonferroni_full").has_value());
    CHECK(parse_format("json") == ReportFormat::json);
  }

  TEST_CASE("command-line exit codes and determinism") {
    TempDir dir;
    const auto toy = dir.write("toy.txt", kToy);
    const auto bad = dir.write("bad.txt", "t # 0 1\nv 0 A\nq\n");
    const auto single = dir.write("single.txt", "t # 0 1\nv 0 A\n");
    const auto big = dir.write("big.txt", planted_text(4, 60));
    const auto out1 = dir.path / "a.json";
    const auto out2 = dir.path / "b.json";

    CHECK(run_cli("--input " + toy.string() + " --output " + out1.string()) == 0);
    CHECK(slurp(out1).rfind("pattern,vertices", 0) == 0);
    const std::string eff = " --correction efftests --permutations 100 --fwer-permutations 100 --seed 5 --format json";
    CHECK(run_cli("--input " + big.string() + eff + " --output " + out1.string()) == 0);
    CHECK(run_cli("--input " + big.string() + eff + " --threads 4 --output " + out2.string()) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK_FALSE(slurp(out1).empty());

    CHECK(run_cli("--input " + toy.string() + " --alpha 0") == 1);
    CHECK(run_cli("--input " + toy.string() + " --strategy fastest") == 1);
    CHECK(run_cli("--alpha 0.05") == 1);
    CHECK(run_cli("--input " + (dir.path / "missing.txt").string()) == 2);
    CHECK(run_cli("--input " + bad.string()) == 2);
    CHECK(run_cli("--input " + single.string()) == 2);
    CHECK(run_cli("--input " + toy.string() + " --output " + (dir.path / "no/such/dir.csv").string()) == 2);
    CHECK(run_cli("--input " + big.string() + " --correction bonferroni-full --bf-timeout 0.000000001") == 3);

    const auto trace = dir.path / "trace.tsv";
    CHECK(run_cli("--input " + toy.string() + " --trace " + trace.string()) == 0);
    const auto t = slurp(trace);
    CHECK(t.rfind("phase\tsigma\tbudget\tstatus\temitted\tmillis\n", 0) == 0);
    CHECK(t.find("root\t4\t1\tterminated\t2\t") != std::string::npos);
  }
}
