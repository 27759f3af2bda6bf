#include "sigsub/dfs_code.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <tuple>

namespace sigsub {

bool dfs_less(const DfsEdge& a, const DfsEdge& b) {
  if (a.from == b.from && a.to == b.to)
    return std::tie(a.from_label, a.edge_label, a.to_label) < std::tie(b.from_label, b.edge_label, b.to_label);
  const bool af = a.is_forward();
  const bool bf = b.is_forward();
  if (af && bf) return a.to < b.to || (a.to == b.to && a.from > b.from);
  if (!af && !bf) return a.from < b.from || (a.from == b.from && a.to < b.to);
  if (!af) return a.from < b.to;  // backward vs forward
  return a.to <= b.from;          // forward vs backward
}

bool code_less(std::span<const DfsEdge> a, std::span<const DfsEdge> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), dfs_less);
}

std::uint32_t code_vertex_count(std::span<const DfsEdge> code) {
  std::uint32_t count = 0;
  for (const auto& e : code) count = std::max({count, e.from + 1, e.to + 1});
  return count;
}

std::vector<std::size_t> rightmost_path(std::span<const DfsEdge> code) {
  std::vector<std::size_t> path;
  std::optional<std::uint32_t> next;
  for (std::size_t i = code.size(); i-- > 0;) {
    const auto& e = code[i];
    if (e.is_forward() && (!next || *next == e.to)) {
      path.push_back(i);
      next = e.from;
    }
  }
  return path;
}

void validate_code(std::span<const DfsEdge> code) {
  if (code.empty()) return;
  if (code[0].from != 0 || code[0].to != 1) throw std::invalid_argument("code must start with edge (0,1)");
  std::vector<Label> labels{code[0].from_label, code[0].to_label};
  std::vector<std::pair<std::uint32_t, std::uint32_t>> seen{{0, 1}};
  // parent[v] is the DFS parent of v; the rightmost path is the parent chain of the newest vertex.
  std::vector<std::uint32_t> parent{0, 0};
  auto on_rightmost_path = [&](std::uint32_t v) {
    std::uint32_t cur = static_cast<std::uint32_t>(labels.size() - 1);
    while (true) {
      if (cur == v) return true;
      if (cur == 0) return false;
      cur = parent[cur];
    }
  };
  for (std::size_t i = 1; i < code.size(); ++i) {
    const auto& e = code[i];
    const auto vcount = static_cast<std::uint32_t>(labels.size());
    const std::uint32_t rightmost = vcount - 1;
    if (e.is_forward()) {
      if (e.to != vcount || !on_rightmost_path(e.from))
        throw std::invalid_argument("forward edge is not a rightmost-path extension");
      if (labels[e.from] != e.from_label) throw std::invalid_argument("inconsistent vertex label");
      labels.push_back(e.to_label);
      parent.push_back(e.from);
    } else {
      if (e.from != rightmost || e.to >= e.from || !on_rightmost_path(e.to))
        throw std::invalid_argument("backward edge is not a rightmost-path extension");
      if (labels[e.from] != e.from_label || labels[e.to] != e.to_label)
        throw std::invalid_argument("inconsistent vertex label");
    }
    const std::pair<std::uint32_t, std::uint32_t> key{std::min(e.from, e.to), std::max(e.from, e.to)};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) throw std::invalid_argument("repeated edge in code");
    seen.emplace_back(key);
  }
}

LabeledGraph code_to_graph(std::span<const DfsEdge> code) {
  if (code.empty()) return LabeledGraph(0, {}, {});
  return code_to_graph(code, code[0].from_label);
}

LabeledGraph code_to_graph(std::span<const DfsEdge> code, Label root_label) {
  std::vector<Label> labels{root_label};
  std::vector<LabeledEdge> edges;
  for (const auto& e : code) {
    if (e.is_forward()) {
      if (labels.size() <= e.to) labels.resize(e.to + 1);
      labels[e.from] = e.from_label;
      labels[e.to] = e.to_label;
    }
    edges.push_back({e.from, e.to, e.edge_label});
  }
  return LabeledGraph(0, std::move(labels), std::move(edges));
}

namespace {

struct Embedding {
  std::vector<VertexIndex> vmap;  // DFS index -> graph vertex
  std::vector<std::int32_t> inv;  // graph vertex -> DFS index, -1 if unmapped
  std::vector<char> used;         // graph edge -> already in code
};

// Builds the minimum code of `g` edge by edge. With a target, stops at the first position where
// the target deviates from the minimum.
class MinCodeBuilder {
 public:
  explicit MinCodeBuilder(const LabeledGraph& g) : g_(g) {}

  bool run(std::span<const DfsEdge> target, DfsCode* out) {
    if (g_.edge_count() == 0) return target.empty();
    std::optional<DfsEdge> best;
    for (VertexIndex u = 0; u < g_.vertex_count(); ++u)
      for (const auto& nb : g_.neighbors(u)) {
        if (g_.vertex_label(u) > g_.vertex_label(nb.vertex)) continue;
        DfsEdge e{0, 1, g_.vertex_label(u), nb.edge_label, g_.vertex_label(nb.vertex)};
        if (!best || dfs_less(e, *best)) best = e;
      }
    if (!accept(*best, target, out)) return false;
    std::vector<Embedding> current;
    for (VertexIndex u = 0; u < g_.vertex_count(); ++u)
      for (const auto& nb : g_.neighbors(u)) {
        DfsEdge e{0, 1, g_.vertex_label(u), nb.edge_label, g_.vertex_label(nb.vertex)};
        if (!(e == *best)) continue;
        Embedding emb;
        emb.vmap = {u, nb.vertex};
        emb.inv.assign(g_.vertex_count(), -1);
        emb.inv[u] = 0;
        emb.inv[nb.vertex] = 1;
        emb.used.assign(g_.edge_count(), 0);
        emb.used[nb.edge_index] = 1;
        current.push_back(std::move(emb));
      }

    while (code_.size() < g_.edge_count()) {
      const auto path = rightmost_path(code_);
      const std::uint32_t rightmost = code_[path.front()].to;
      const auto next_index = static_cast<std::uint32_t>(code_vertex_count(code_));
      std::vector<std::uint32_t> path_vertices{rightmost};
      for (auto idx : path) path_vertices.push_back(code_[idx].from);

      std::optional<DfsEdge> step;
      auto consider = [&](const DfsEdge& e) {
        if (!step || dfs_less(e, *step)) step = e;
      };
      for (const auto& emb : current) for_each_extension(emb, rightmost, next_index, path_vertices, consider);
      if (!step) return false;  // disconnected input
      if (!accept(*step, target, out)) return false;

      std::vector<Embedding> next;
      for (const auto& emb : current) {
        for_each_extension_edge(emb, rightmost, next_index, path_vertices, [&](const DfsEdge& e, VertexIndex gv,
                                                                              std::uint32_t edge_index) {
          if (!(e == *step)) return;
          Embedding child = emb;
          child.used[edge_index] = 1;
          if (e.is_forward()) {
            child.vmap.push_back(gv);
            child.inv[gv] = static_cast<std::int32_t>(e.to);
          }
          next.push_back(std::move(child));
        });
      }
      current = std::move(next);
    }
    return code_.size() == target.size() || target.empty();
  }

 private:
  bool accept(const DfsEdge& e, std::span<const DfsEdge> target, DfsCode* out) {
    if (!target.empty()) {
      if (code_.size() >= target.size() || !(target[code_.size()] == e)) return false;
    }
    code_.push_back(e);
    if (out) out->push_back(e);
    return true;
  }

  template <typename Fn>
  void for_each_extension_edge(const Embedding& emb, std::uint32_t rightmost, std::uint32_t next_index,
                               const std::vector<std::uint32_t>& path_vertices, Fn&& fn) const {
    const VertexIndex r = emb.vmap[rightmost];
    for (const auto& nb : g_.neighbors(r)) {
      if (emb.used[nb.edge_index]) continue;
      const auto target_index = emb.inv[nb.vertex];
      if (target_index < 0) continue;
      const auto t = static_cast<std::uint32_t>(target_index);
      if (std::find(path_vertices.begin() + 1, path_vertices.end(), t) == path_vertices.end()) continue;
      fn(DfsEdge{rightmost, t, g_.vertex_label(r), nb.edge_label, g_.vertex_label(nb.vertex)}, nb.vertex,
         nb.edge_index);
    }
    for (auto from : path_vertices) {
      const VertexIndex gv = emb.vmap[from];
      for (const auto& nb : g_.neighbors(gv)) {
        if (emb.inv[nb.vertex] >= 0) continue;
        fn(DfsEdge{from, next_index, g_.vertex_label(gv), nb.edge_label, g_.vertex_label(nb.vertex)}, nb.vertex,
           nb.edge_index);
      }
    }
  }

  template <typename Fn>
  void for_each_extension(const Embedding& emb, std::uint32_t rightmost, std::uint32_t next_index,
                          const std::vector<std::uint32_t>& path_vertices, Fn&& fn) const {
    for_each_extension_edge(emb, rightmost, next_index, path_vertices,
                            [&](const DfsEdge& e, VertexIndex, std::uint32_t) { fn(e); });
  }

  const LabeledGraph& g_;
  DfsCode code_;
};

}  // namespace

namespace detail {
bool is_minimal_unchecked(std::span<const DfsEdge> code) {
  if (code.size() <= 1) return code.empty() || code[0].from_label <= code[0].to_label;
  const auto g = code_to_graph(code);
  return MinCodeBuilder(g).run(code, nullptr);
}
}  // namespace detail

bool is_canonical(std::span<const DfsEdge> code) {
  validate_code(code);
  return detail::is_minimal_unchecked(code);
}

DfsCode minimum_code(const LabeledGraph& g) {
  DfsCode out;
  MinCodeBuilder(g).run({}, &out);
  return out;
}

}  // namespace sigsub
