#include "sigsub/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sigsub/errors.hpp"

namespace sigsub {

Label SymbolTable::intern(std::string_view token) {
  std::string key(token);
  if (auto it = ids_.find(key); it != ids_.end()) return it->second;
  const auto id = static_cast<Label>(tokens_.size());
  tokens_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<Label> SymbolTable::find(std::string_view token) const {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  return std::nullopt;
}

LabeledGraph::LabeledGraph(std::int64_t graph_id, std::vector<Label> vertex_labels,
                           std::vector<LabeledEdge> edges)
    : id_(graph_id), vertex_labels_(std::move(vertex_labels)), edges_(std::move(edges)),
      adjacency_(vertex_labels_.size()) {
  for (std::uint32_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    if (e.u >= vertex_labels_.size() || e.v >= vertex_labels_.size())
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop on vertex " + std::to_string(e.u));
    for (const auto& nb : adjacency_[e.u])
      if (nb.vertex == e.v)
        throw std::invalid_argument("parallel edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
    adjacency_[e.u].push_back({e.v, e.label, k});
    adjacency_[e.v].push_back({e.u, e.label, k});
  }
}

std::optional<Label> LabeledGraph::edge_label(VertexIndex u, VertexIndex v) const {
  for (const auto& nb : adjacency_[u])
    if (nb.vertex == v) return nb.edge_label;
  return std::nullopt;
}

GraphDatabase::GraphDatabase(std::vector<LabeledGraph> graphs, std::vector<int> user_classes,
                             SymbolTable vertex_symbols, SymbolTable edge_symbols)
    : graphs_(std::move(graphs)), user_classes_(std::move(user_classes)),
      vertex_symbols_(std::move(vertex_symbols)), edge_symbols_(std::move(edge_symbols)),
      positive_(graphs_.size()) {
  if (graphs_.empty()) throw ValidityError("database contains no graphs");
  if (user_classes_.size() != graphs_.size())
    throw LabelError("class count does not match graph count");
  std::uint32_t ones = 0;
  for (int c : user_classes_) {
    if (c != 0 && c != 1) throw LabelError("class value " + std::to_string(c) + " is not 0 or 1");
    ones += static_cast<std::uint32_t>(c);
  }
  const auto zeros = static_cast<std::uint32_t>(graphs_.size()) - ones;
  if (ones == 0 || zeros == 0) throw ValidityError("database contains a single class");
  swapped_ = ones > zeros;
  const int positive_class = swapped_ ? 0 : 1;
  for (std::size_t i = 0; i < graphs_.size(); ++i)
    if (user_classes_[i] == positive_class) positive_.set(i);
  n_ = swapped_ ? zeros : ones;
  n_prime_ = swapped_ ? ones : zeros;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view s, std::size_t line, const char* what) {
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  return value;
}

bool skippable(const std::vector<std::string_view>& fields) {
  return fields.empty() || fields.front().front() == '%';
}

struct PendingGraph {
  std::int64_t id = 0;
  std::optional<int> inline_class;
  std::vector<Label> vertices;
  std::vector<LabeledEdge> edges;
  std::size_t line = 0;
};

}  // namespace

TransactionSet parse_transactions(std::istream& in, std::istream* labels) {
  SymbolTable vertex_symbols;
  SymbolTable edge_symbols;
  std::vector<PendingGraph> pending;
  std::map<std::int64_t, std::size_t> index_of;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto fields = split_fields(raw);
    if (skippable(fields)) continue;
    const auto tag = fields[0];
    if (tag == "t") {
      if (fields.size() < 3 || fields.size() > 4 || fields[1] != "#")
        throw ParseError(line_no, "expected 't # <graph_id> [<class>]'");
      PendingGraph g;
      g.id = parse_int<std::int64_t>(fields[2], line_no, "graph id");
      g.line = line_no;
      if (fields.size() == 4) {
        const int c = parse_int<int>(fields[3], line_no, "class");
        if (c != 0 && c != 1)
          throw LabelError("line " + std::to_string(line_no) + ": class " + std::to_string(c) + " is not 0 or 1");
        g.inline_class = c;
      }
      if (!index_of.emplace(g.id, pending.size()).second)
        throw ParseError(line_no, "duplicate graph id " + std::to_string(g.id));
      pending.push_back(std::move(g));
    } else if (tag == "v") {
      if (pending.empty()) throw ParseError(line_no, "vertex before any 't' line");
      if (fields.size() != 3) throw ParseError(line_no, "expected 'v <vertex_id> <label>'");
      auto& g = pending.back();
      const auto vid = parse_int<std::uint32_t>(fields[1], line_no, "vertex id");
      if (vid != g.vertices.size())
        throw ParseError(line_no, "vertex ids must be consecutive from 0, got " + std::to_string(vid));
      if (!g.edges.empty()) throw ParseError(line_no, "vertex after edges");
      g.vertices.push_back(vertex_symbols.intern(fields[2]));
    } else if (tag == "e") {
      if (pending.empty()) throw ParseError(line_no, "edge before any 't' line");
      if (fields.size() != 4) throw ParseError(line_no, "expected 'e <src> <dst> <label>'");
      auto& g = pending.back();
      const auto u = parse_int<std::uint32_t>(fields[1], line_no, "edge source");
      const auto v = parse_int<std::uint32_t>(fields[2], line_no, "edge target");
      if (u >= g.vertices.size() || v >= g.vertices.size())
        throw ParseError(line_no, "edge endpoint refers to an undeclared vertex");
      if (u == v) throw ParseError(line_no, "self-loop on vertex " + std::to_string(u));
      for (const auto& e : g.edges)
        if ((e.u == u && e.v == v) || (e.u == v && e.v == u))
          throw ParseError(line_no, "parallel edge " + std::to_string(u) + "-" + std::to_string(v));
      g.edges.push_back({u, v, edge_symbols.intern(fields[3])});
    } else {
      throw ParseError(line_no, "unknown record type '" + std::string(tag) + "'");
    }
  }

  if (pending.empty()) throw ValidityError("database contains no graphs");

  std::vector<std::optional<int>> classes(pending.size());
  if (labels != nullptr) {
    std::size_t label_line = 0;
    while (std::getline(*labels, raw)) {
      ++label_line;
      const auto fields = split_fields(raw);
      if (skippable(fields)) continue;
      if (fields.size() != 2) throw ParseError(label_line, "expected '<graph_id> <class>' in labels file");
      const auto gid = parse_int<std::int64_t>(fields[0], label_line, "graph id");
      const auto c = parse_int<int>(fields[1], label_line, "class");
      auto it = index_of.find(gid);
      if (it == index_of.end())
        throw LabelError("labels file line " + std::to_string(label_line) + ": unknown graph id " + std::to_string(gid));
      if (c != 0 && c != 1)
        throw LabelError("labels file line " + std::to_string(label_line) + ": class " + std::to_string(c) + " is not 0 or 1");
      if (classes[it->second])
        throw LabelError("labels file line " + std::to_string(label_line) + ": duplicate class for graph " + std::to_string(gid));
      classes[it->second] = c;
    }
  } else {
    for (std::size_t i = 0; i < pending.size(); ++i) classes[i] = pending[i].inline_class;
  }

  TransactionSet out;
  out.graphs.reserve(pending.size());
  out.classes.reserve(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (!classes[i]) throw LabelError("missing class for graph " + std::to_string(pending[i].id));
    out.classes.push_back(*classes[i]);
    out.graphs.emplace_back(pending[i].id, std::move(pending[i].vertices), std::move(pending[i].edges));
  }
  out.vertex_symbols = std::move(vertex_symbols);
  out.edge_symbols = std::move(edge_symbols);
  return out;
}

TransactionSet parse_transactions(std::string_view graph_text) {
  std::istringstream in{std::string(graph_text)};
  return parse_transactions(in, nullptr);
}

GraphDatabase parse_database(std::istream& in, std::istream* labels) {
  auto t = parse_transactions(in, labels);
  return GraphDatabase(std::move(t.graphs), std::move(t.classes), std::move(t.vertex_symbols),
                       std::move(t.edge_symbols));
}

GraphDatabase parse_database(std::string_view graph_text) {
  std::istringstream in{std::string(graph_text)};
  return parse_database(in, nullptr);
}

GraphDatabase parse_database(std::string_view graph_text, std::string_view labels_text) {
  std::istringstream in{std::string(graph_text)};
  std::istringstream labels{std::string(labels_text)};
  return parse_database(in, &labels);
}

void write_database(std::ostream& out, const GraphDatabase& db) {
  const auto& vs = db.vertex_symbols();
  const auto& es = db.edge_symbols();
  for (std::size_t i = 0; i < db.size(); ++i) {
    const auto& g = db.graph(i);
    out << "t # " << g.id() << ' ' << db.user_class(i) << '\n';
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      out << "v " << v << ' ' << vs.token(g.vertex_label(static_cast<VertexIndex>(v))) << '\n';
    for (const auto& e : g.edges()) out << "e " << e.u << ' ' << e.v << ' ' << es.token(e.label) << '\n';
  }
}

OccurrenceBits occurrence_bitvector(const GraphDatabase& db, std::span<const std::uint32_t> transaction_ids) {
  OccurrenceBits bits(db.size());
  for (auto id : transaction_ids) bits.set(id);
  return bits;
}

}  // namespace sigsub
