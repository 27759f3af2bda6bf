#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sigsub/graph.hpp"

namespace sigsub {

/// One step of an edge-growth code: an edge between DFS discovery indices `from` and `to`.
/// Forward edges (from < to) discover a new vertex; backward edges (from > to) close a cycle.
struct DfsEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  Label from_label = 0;
  Label edge_label = 0;
  Label to_label = 0;

  bool is_forward() const noexcept { return from < to; }
  friend bool operator==(const DfsEdge&, const DfsEdge&) = default;
};

/// Total order on DFS edges: structural position first, then (from, edge, to) labels.
bool dfs_less(const DfsEdge& a, const DfsEdge& b);

struct DfsEdgeLess {
  bool operator()(const DfsEdge& a, const DfsEdge& b) const { return dfs_less(a, b); }
};

using DfsCode = std::vector<DfsEdge>;

/// Lexicographic comparison of whole codes under dfs_less.
bool code_less(std::span<const DfsEdge> a, std::span<const DfsEdge> b);

/// Number of distinct DFS indices used by the code.
std::uint32_t code_vertex_count(std::span<const DfsEdge> code);

/// Indices into `code` of the forward edges on the rightmost path, rightmost edge first.
std::vector<std::size_t> rightmost_path(std::span<const DfsEdge> code);

/// Throws std::invalid_argument unless every edge is a valid rightmost-path extension of its
/// prefix with consistent labels and no repeated edge.
void validate_code(std::span<const DfsEdge> code);

/// Graph spelled by a code; vertex i is DFS index i. A code with no edges has no vertices, so
/// single-vertex patterns go through the overload taking the root label.
LabeledGraph code_to_graph(std::span<const DfsEdge> code);
LabeledGraph code_to_graph(std::span<const DfsEdge> code, Label root_label);

/// True iff `code` is the minimum code of its isomorphism class. A malformed code is a
/// contract violation and throws std::invalid_argument.
bool is_canonical(std::span<const DfsEdge> code);

/// Minimum code of a connected graph with at least one edge.
DfsCode minimum_code(const LabeledGraph& g);

namespace detail {
/// is_canonical without the structural validation; the miner only produces well-formed codes.
bool is_minimal_unchecked(std::span<const DfsEdge> code);
}  // namespace detail

}  // namespace sigsub
