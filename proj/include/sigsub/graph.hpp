#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sigsub/bitset.hpp"

namespace sigsub {

/// Dense label id. Input tokens are interned through a SymbolTable.
using Label = std::uint32_t;
using VertexIndex = std::uint32_t;

/// Maps arbitrary label tokens to dense ids in order of first appearance.
class SymbolTable {
 public:
  Label intern(std::string_view token);
  std::optional<Label> find(std::string_view token) const;
  const std::string& token(Label id) const { return tokens_.at(id); }
  std::size_t size() const noexcept { return tokens_.size(); }

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Label> ids_;
};

struct LabeledEdge {
  VertexIndex u;
  VertexIndex v;
  Label label;

  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

/// Simple undirected graph with vertex and edge labels. Immutable once built.
class LabeledGraph {
 public:
  struct Neighbor {
    VertexIndex vertex;
    Label edge_label;
    std::uint32_t edge_index;
  };

  /// Throws std::invalid_argument on self-loops, parallel edges or bad endpoints.
  LabeledGraph(std::int64_t graph_id, std::vector<Label> vertex_labels, std::vector<LabeledEdge> edges);

  std::int64_t id() const noexcept { return id_; }
  std::size_t vertex_count() const noexcept { return vertex_labels_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  Label vertex_label(VertexIndex v) const { return vertex_labels_[v]; }
  std::span<const Label> vertex_labels() const noexcept { return vertex_labels_; }
  std::span<const LabeledEdge> edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(VertexIndex v) const { return adjacency_[v]; }
  std::optional<Label> edge_label(VertexIndex u, VertexIndex v) const;

  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
    return a.id_ == b.id_ && a.vertex_labels_ == b.vertex_labels_ && a.edges_ == b.edges_;
  }

 private:
  std::int64_t id_;
  std::vector<Label> vertex_labels_;
  std::vector<LabeledEdge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Two-class graph collection. Internally the positive class is always the smaller one
/// (n <= n_prime); `swapped()` records whether the user's class 1 had to become the
/// internal negative class to get there.
class GraphDatabase {
 public:
  /// `user_classes[i]` is the class (0 or 1) given for graphs[i]. Throws ValidityError for an
  /// empty or single-class database and LabelError for classes outside {0,1}.
  GraphDatabase(std::vector<LabeledGraph> graphs, std::vector<int> user_classes,
                SymbolTable vertex_symbols, SymbolTable edge_symbols);

  std::size_t size() const noexcept { return graphs_.size(); }
  std::span<const LabeledGraph> graphs() const noexcept { return graphs_; }
  const LabeledGraph& graph(std::size_t i) const { return graphs_[i]; }

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t n_prime() const noexcept { return n_prime_; }
  bool swapped() const noexcept { return swapped_; }

  /// Internal class: true when graph i belongs to the smaller (positive) collection.
  bool is_positive(std::size_t i) const { return positive_.test(i); }
  /// Class as given in the input.
  int user_class(std::size_t i) const { return user_classes_[i]; }
  std::span<const int> user_classes() const noexcept { return user_classes_; }
  const OccurrenceBits& positive_mask() const noexcept { return positive_; }

  const SymbolTable& vertex_symbols() const noexcept { return vertex_symbols_; }
  const SymbolTable& edge_symbols() const noexcept { return edge_symbols_; }

  friend bool operator==(const GraphDatabase& a, const GraphDatabase& b) {
    return a.graphs_ == b.graphs_ && a.user_classes_ == b.user_classes_ &&
           a.vertex_symbols_ == b.vertex_symbols_ && a.edge_symbols_ == b.edge_symbols_;
  }

 private:
  std::vector<LabeledGraph> graphs_;
  std::vector<int> user_classes_;
  SymbolTable vertex_symbols_;
  SymbolTable edge_symbols_;
  OccurrenceBits positive_;
  std::uint32_t n_ = 0;
  std::uint32_t n_prime_ = 0;
  bool swapped_ = false;
};

/// Parsed input before the two-class checks: graphs in file order with their user classes.
struct TransactionSet {
  std::vector<LabeledGraph> graphs;
  std::vector<int> classes;
  SymbolTable vertex_symbols;
  SymbolTable edge_symbols;
};

/// Syntax and label checks only; throws ParseError or LabelError.
TransactionSet parse_transactions(std::istream& graphs, std::istream* labels = nullptr);
TransactionSet parse_transactions(std::string_view graph_text);

/// Reads the line-oriented transaction format:
///   t # <graph_id> [<class>]
///   v <vertex_id> <vertex_label>
///   e <src> <dst> <edge_label>
/// Blank lines and lines starting with '%' are skipped. When `labels` is given it must list
/// every graph exactly once as `<graph_id> <class>` and overrides inline classes. On top of
/// parse_transactions this throws ValidityError for an empty or single-class database.
GraphDatabase parse_database(std::istream& graphs, std::istream* labels = nullptr);
GraphDatabase parse_database(std::string_view graph_text);
GraphDatabase parse_database(std::string_view graph_text, std::string_view labels_text);

/// Writes the database back in transaction format with inline user classes.
void write_database(std::ostream& out, const GraphDatabase& db);

/// Bit i set iff i is in `transaction_ids`. Ids index db.graphs().
OccurrenceBits occurrence_bitvector(const GraphDatabase& db, std::span<const std::uint32_t> transaction_ids);

}  // namespace sigsub
