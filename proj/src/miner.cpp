#include "sigsub/miner.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace sigsub {

std::string code_string(const Pattern& p, const GraphDatabase& db) {
  const auto& vs = db.vertex_symbols();
  const auto& es = db.edge_symbols();
  if (p.is_singleton()) return "0," + vs.token(p.root_label);
  std::string out;
  for (const auto& e : p.code) {
    if (!out.empty()) out += ';';
    out += std::to_string(e.from) + ',' + std::to_string(e.to) + ',' + vs.token(e.from_label) + ',' +
           es.token(e.edge_label) + ',' + vs.token(e.to_label);
  }
  return out;
}

LabeledGraph pattern_graph(const Pattern& p) { return code_to_graph(p.code, p.root_label); }

void MinerConfig::validate() const {
  if (min_frequency < 1) throw std::invalid_argument("min_frequency must be >= 1");
  if (max_vertices && *max_vertices < 1) throw std::invalid_argument("max_vertices must be >= 1");
}

std::string_view to_string(MiningStatus status) {
  switch (status) {
    case MiningStatus::completed: return "completed";
    case MiningStatus::terminated_early: return "terminated";
    case MiningStatus::cancelled: return "cancelled";
  }
  return "completed";
}

namespace {

struct Embedding {
  std::uint32_t graph;
  VertexIndex from;
  VertexIndex to;
  std::uint32_t edge_index;
  const Embedding* prev;
};

using Projection = std::vector<Embedding>;

class Miner {
 public:
  Miner(const GraphDatabase& db, const MinerConfig& config, const MinerControl& control)
      : db_(db), config_(config), control_(control) {
    std::size_t max_v = 0;
    std::size_t max_e = 0;
    for (const auto& g : db.graphs()) {
      max_v = std::max(max_v, g.vertex_count());
      max_e = std::max(max_e, g.edge_count());
    }
    vertex_stamp_.assign(max_v, 0);
    vertex_dfs_.assign(max_v, 0);
    edge_stamp_.assign(max_e, 0);
  }

  MiningOutcome run() {
    mine_singletons();
    if (!stopped() && allows_vertices(2)) mine_edges();
    MiningOutcome out;
    out.emitted_count = emitted_;
    out.status = status_;
    if (status_ == MiningStatus::completed) out.patterns = std::move(patterns_);
    return out;
  }

 private:
  bool stopped() const { return status_ != MiningStatus::completed; }

  bool allows_vertices(std::uint32_t count) const { return !config_.max_vertices || count <= *config_.max_vertices; }

  bool check_control() {
    if (control_.cancel && control_.cancel->load(std::memory_order_relaxed)) status_ = MiningStatus::cancelled;
    if (control_.deadline && std::chrono::steady_clock::now() >= *control_.deadline)
      status_ = MiningStatus::cancelled;
    return !stopped();
  }

  // Returns false once the run has to stop.
  bool emit(Pattern p) {
    ++emitted_;
    if (config_.pattern_budget && emitted_ > *config_.pattern_budget) {
      status_ = MiningStatus::terminated_early;
      patterns_.clear();
      return false;
    }
    patterns_.push_back(std::move(p));
    return true;
  }

  void fill_support(Pattern& p, std::vector<std::uint32_t> occurrences) {
    p.occurrences = std::move(occurrences);
    p.x = 0;
    for (auto id : p.occurrences) p.x += db_.is_positive(id) ? 1U : 0U;
    p.x_prime = static_cast<std::uint32_t>(p.occurrences.size()) - p.x;
  }

  void mine_singletons() {
    if (!config_.count_singletons) return;
    std::vector<std::vector<std::uint32_t>> occ(db_.vertex_symbols().size());
    for (std::uint32_t gi = 0; gi < db_.size(); ++gi)
      for (auto label : db_.graph(gi).vertex_labels())
        if (occ[label].empty() || occ[label].back() != gi) occ[label].push_back(gi);
    for (Label label = 0; label < occ.size(); ++label) {
      if (occ[label].size() < config_.min_frequency) continue;
      if (!check_control()) return;
      Pattern p;
      p.root_label = label;
      p.vertex_count = 1;
      fill_support(p, std::move(occ[label]));
      if (!emit(std::move(p))) return;
    }
  }

  void mine_edges() {
    std::map<DfsEdge, Projection, DfsEdgeLess> roots;
    for (std::uint32_t gi = 0; gi < db_.size(); ++gi) {
      const auto& g = db_.graph(gi);
      for (VertexIndex u = 0; u < g.vertex_count(); ++u)
        for (const auto& nb : g.neighbors(u)) {
          if (g.vertex_label(u) > g.vertex_label(nb.vertex)) continue;
          roots[DfsEdge{0, 1, g.vertex_label(u), nb.edge_label, g.vertex_label(nb.vertex)}].push_back(
              {gi, u, nb.vertex, nb.edge_index, nullptr});
        }
    }
    for (auto& [edge, projection] : roots) {
      code_.assign(1, edge);
      expand(projection);
      if (stopped()) return;
    }
  }

  static std::vector<std::uint32_t> graphs_of(const Projection& projection) {
    std::vector<std::uint32_t> ids;
    for (const auto& emb : projection)
      if (ids.empty() || ids.back() != emb.graph) ids.push_back(emb.graph);
    return ids;
  }

  // Loads the embedding chain into vmap_ and the stamped vertex/edge scratch arrays.
  void load_history(const Embedding& emb) {
    ++stamp_;
    chain_.clear();
    for (const Embedding* cur = &emb; cur != nullptr; cur = cur->prev) chain_.push_back(cur);
    std::reverse(chain_.begin(), chain_.end());
    vmap_.assign(code_vertex_count_, 0);
    for (std::size_t i = 0; i < chain_.size(); ++i) {
      const auto& c = code_[i];
      const Embedding* step = chain_[i];
      vmap_[c.from] = step->from;
      vmap_[c.to] = step->to;
      vertex_stamp_[step->from] = stamp_;
      vertex_dfs_[step->from] = c.from;
      vertex_stamp_[step->to] = stamp_;
      vertex_dfs_[step->to] = c.to;
      edge_stamp_[step->edge_index] = stamp_;
    }
  }

  void expand(const Projection& projection) {
    auto occurrences = graphs_of(projection);
    if (occurrences.size() < config_.min_frequency) return;
    if (!check_control()) return;
    if (!detail::is_minimal_unchecked(code_)) return;

    code_vertex_count_ = code_vertex_count(code_);
    Pattern p;
    p.code = code_;
    p.root_label = code_[0].from_label;
    p.vertex_count = code_vertex_count_;
    p.edge_count = static_cast<std::uint32_t>(code_.size());
    fill_support(p, std::move(occurrences));
    if (!emit(std::move(p))) return;

    const auto path = rightmost_path(code_);
    const std::uint32_t rightmost = code_[path.front()].to;
    const std::uint32_t next_index = code_vertex_count_;
    const Label min_label = code_[0].from_label;
    const bool grow = allows_vertices(code_vertex_count_ + 1);
    // path_from[k]: DFS index of the tail of path edge k; the edge itself constrains forward growth.
    std::vector<std::uint32_t> path_from;
    for (auto idx : path) path_from.push_back(code_[idx].from);

    std::map<DfsEdge, Projection, DfsEdgeLess> children;
    for (const auto& emb : projection) {
      load_history(emb);
      const auto& g = db_.graph(emb.graph);
      const VertexIndex r = vmap_[rightmost];

      for (const auto& nb : g.neighbors(r)) {
        if (edge_stamp_[nb.edge_index] == stamp_ || vertex_stamp_[nb.vertex] != stamp_) continue;
        const std::uint32_t t = vertex_dfs_[nb.vertex];
        if (std::find(path_from.begin(), path_from.end(), t) == path_from.end()) continue;
        children[DfsEdge{rightmost, t, g.vertex_label(r), nb.edge_label, g.vertex_label(nb.vertex)}].push_back(
            {emb.graph, r, nb.vertex, nb.edge_index, &emb});
      }
      if (!grow) continue;

      for (const auto& nb : g.neighbors(r)) {
        if (vertex_stamp_[nb.vertex] == stamp_ || g.vertex_label(nb.vertex) < min_label) continue;
        children[DfsEdge{rightmost, next_index, g.vertex_label(r), nb.edge_label, g.vertex_label(nb.vertex)}]
            .push_back({emb.graph, r, nb.vertex, nb.edge_index, &emb});
      }
      for (std::size_t k = 0; k < path.size(); ++k) {
        const DfsEdge& on_path = code_[path[k]];
        const VertexIndex u = vmap_[on_path.from];
        for (const auto& nb : g.neighbors(u)) {
          if (vertex_stamp_[nb.vertex] == stamp_) continue;
          const Label to_label = g.vertex_label(nb.vertex);
          if (to_label < min_label) continue;
          // A smaller edge out of u would have been taken before the path edge.
          if (on_path.edge_label > nb.edge_label ||
              (on_path.edge_label == nb.edge_label && on_path.to_label > to_label))
            continue;
          children[DfsEdge{on_path.from, next_index, g.vertex_label(u), nb.edge_label, to_label}].push_back(
              {emb.graph, u, nb.vertex, nb.edge_index, &emb});
        }
      }
    }

    for (auto& [edge, child] : children) {
      code_.push_back(edge);
      expand(child);
      code_.pop_back();
      if (stopped()) return;
    }
    code_vertex_count_ = code_vertex_count(code_);
  }

  const GraphDatabase& db_;
  const MinerConfig& config_;
  const MinerControl& control_;
  MiningStatus status_ = MiningStatus::completed;
  std::uint64_t emitted_ = 0;
  std::vector<Pattern> patterns_;

  DfsCode code_;
  std::uint32_t code_vertex_count_ = 0;
  std::uint64_t stamp_ = 0;
  std::vector<std::uint64_t> vertex_stamp_;
  std::vector<std::uint32_t> vertex_dfs_;
  std::vector<std::uint64_t> edge_stamp_;
  std::vector<const Embedding*> chain_;
  std::vector<VertexIndex> vmap_;
};

}  // namespace

MiningOutcome mine(const GraphDatabase& db, const MinerConfig& config, const MinerControl& control) {
  config.validate();
  return Miner(db, config, control).run();
}

namespace {

class Matcher {
 public:
  Matcher(const LabeledGraph& g, const LabeledGraph& p) : g_(g), p_(p) {
    order_.reserve(p.vertex_count());
    std::vector<char> seen(p.vertex_count(), 0);
    for (VertexIndex s = 0; s < p.vertex_count(); ++s) {
      if (seen[s]) continue;
      std::deque<VertexIndex> queue{s};
      seen[s] = 1;
      while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        order_.push_back(v);
        for (const auto& nb : p.neighbors(v))
          if (!seen[nb.vertex]) {
            seen[nb.vertex] = 1;
            queue.push_back(nb.vertex);
          }
      }
    }
    image_.assign(p.vertex_count(), kUnmapped);
    taken_.assign(g.vertex_count(), 0);
  }

  bool run() { return p_.vertex_count() <= g_.vertex_count() && p_.edge_count() <= g_.edge_count() && extend(0); }

 private:
  static constexpr VertexIndex kUnmapped = ~VertexIndex{0};

  bool consistent(VertexIndex pv, VertexIndex gv) const {
    if (taken_[gv] || g_.vertex_label(gv) != p_.vertex_label(pv)) return false;
    for (const auto& nb : p_.neighbors(pv)) {
      const auto img = image_[nb.vertex];
      if (img == kUnmapped) continue;
      const auto label = g_.edge_label(gv, img);
      if (!label || *label != nb.edge_label) return false;
    }
    return true;
  }

  bool try_map(std::size_t depth, VertexIndex pv, VertexIndex gv) {
    if (!consistent(pv, gv)) return false;
    image_[pv] = gv;
    taken_[gv] = 1;
    const bool ok = extend(depth + 1);
    image_[pv] = kUnmapped;
    taken_[gv] = 0;
    return ok;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    const VertexIndex pv = order_[depth];
    for (const auto& nb : p_.neighbors(pv)) {
      const auto anchor = image_[nb.vertex];
      if (anchor == kUnmapped) continue;
      for (const auto& gnb : g_.neighbors(anchor))
        if (gnb.edge_label == nb.edge_label && try_map(depth, pv, gnb.vertex)) return true;
      return false;
    }
    for (VertexIndex gv = 0; gv < g_.vertex_count(); ++gv)
      if (try_map(depth, pv, gv)) return true;
    return false;
  }

  const LabeledGraph& g_;
  const LabeledGraph& p_;
  std::vector<VertexIndex> order_;
  std::vector<VertexIndex> image_;
  std::vector<char> taken_;
};

}  // namespace

bool contains(const LabeledGraph& g, const LabeledGraph& pattern) { return Matcher(g, pattern).run(); }

bool contains(const LabeledGraph& g, const Pattern& pattern) { return contains(g, pattern_graph(pattern)); }

}  // namespace sigsub
