#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigsub/dfs_code.hpp"
#include "sigsub/graph.hpp"

namespace sigsub {

/// A connected labeled subgraph with its support. Single-vertex patterns have an empty code
/// and carry their label in `root_label`.
struct Pattern {
  DfsCode code;
  Label root_label = 0;
  std::uint32_t vertex_count = 0;
  std::uint32_t edge_count = 0;
  std::vector<std::uint32_t> occurrences;  // sorted database indices
  std::uint32_t x = 0;                     // support in the positive (smaller) class
  std::uint32_t x_prime = 0;               // support in the negative class

  std::uint32_t frequency() const noexcept { return x + x_prime; }
  bool is_singleton() const noexcept { return code.empty(); }
};

/// Identity string: semicolon-joined `from,to,from_label,edge_label,to_label` quintuples using
/// the input label tokens. A single vertex renders as `0,<label>`.
std::string code_string(const Pattern& p, const GraphDatabase& db);

/// Small graph spelled by the pattern, vertex i being DFS index i.
LabeledGraph pattern_graph(const Pattern& p);

struct MinerConfig {
  std::uint32_t min_frequency = 1;
  std::optional<std::uint32_t> max_vertices;
  std::optional<std::uint64_t> pattern_budget;
  bool count_singletons = true;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Optional external stop conditions, checked between patterns.
struct MinerControl {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  const std::atomic<bool>* cancel = nullptr;
};

enum class MiningStatus { completed, terminated_early, cancelled };

std::string_view to_string(MiningStatus status);

struct MiningOutcome {
  MiningStatus status = MiningStatus::completed;
  std::vector<Pattern> patterns;  // empty unless completed
  std::uint64_t emitted_count = 0;
};

/// Depth-first enumeration of every connected subgraph with frequency >= min_frequency, each
/// isomorphism class once via its minimum DFS code. Single-vertex patterns come first in label
/// order, then edge patterns in code order. With a budget B the run stops as soon as the
/// (B+1)-th frequent pattern is counted.
MiningOutcome mine(const GraphDatabase& db, const MinerConfig& config, const MinerControl& control = {});

/// Non-induced subgraph isomorphism: a label-preserving injection of the pattern into g that
/// maps every pattern edge onto an equally labeled edge of g.
bool contains(const LabeledGraph& g, const LabeledGraph& pattern);
bool contains(const LabeledGraph& g, const Pattern& pattern);

}  // namespace sigsub
