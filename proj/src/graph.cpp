#include "mixsens/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace mixsens {

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::plain: return "plain";
    case EdgeKind::left: return "left";
    case EdgeKind::right: return "right";
    case EdgeKind::bridge: return "bridge";
    case EdgeKind::clique: return "clique";
  }
  return "plain";
}

EdgeKind edge_kind_from_string(std::string_view name) {
  if (name == "plain") return EdgeKind::plain;
  if (name == "left") return EdgeKind::left;
  if (name == "right") return EdgeKind::right;
  if (name == "bridge") return EdgeKind::bridge;
  if (name == "clique") return EdgeKind::clique;
  throw Error("unknown edge kind '" + std::string(name) + "'");
}

std::size_t WeightedGraph::num_edges() const {
  const std::size_t k = clique_.size;
  return edges_.size() + k * (k - (k > 0 ? 1 : 0)) / 2;
}

double WeightedGraph::explicit_weighted_degree(Vertex v) const {
  double s = 0.0;
  for (const auto& inc : adjacency(v)) s += edges_[inc.edge].w;
  return s;
}

double WeightedGraph::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.w;
  const double k = clique_.size;
  return s + k * (k - 1.0) / 2.0;
}

double WeightedGraph::weight_between(Vertex u, Vertex v) const {
  if (u != v && clique_.contains(u) && clique_.contains(v)) return 1.0;
  for (const auto& inc : adjacency(u))
    if (inc.to == v) return edges_[inc.edge].w;
  return 0.0;
}

std::optional<EdgeId> WeightedGraph::find_edge(Vertex u, Vertex v) const {
  for (const auto& inc : adjacency(u))
    if (inc.to == v) return inc.edge;
  return std::nullopt;
}

bool WeightedGraph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<char> seen(n_, 0);
  std::queue<Vertex> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  bool clique_done = false;
  while (!q.empty()) {
    const Vertex x = q.front();
    q.pop();
    auto visit = [&](Vertex y) {
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        q.push(y);
      }
    };
    for (const auto& inc : adjacency(x)) visit(inc.to);
    if (!clique_done && clique_.contains(x)) {
      clique_done = true;
      for (Vertex y = clique_.first; y < clique_.first + clique_.size; ++y) visit(y);
    }
  }
  return count == n_;
}

WeightedGraph WeightedGraph::materialized() const {
  if (!has_implicit_clique()) return *this;
  GraphBuilder b(n_);
  for (std::size_t e = 0; e < edges_.size(); ++e) b.add_edge(edges_[e].u, edges_[e].v, edges_[e].w, tags_[e]);
  const Vertex lo = clique_.first, hi = clique_.first + clique_.size;
  for (Vertex x = lo; x < hi; ++x)
    for (Vertex y = x + 1; y < hi; ++y) b.add_edge(x, y, 1.0, EdgeTag{EdgeKind::clique});
  return std::move(b).build();
}

WeightedGraph WeightedGraph::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size()) throw Error("with_weights: one weight per explicit edge required");
  WeightedGraph out = *this;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (!(weights[e] > 0.0)) throw Error("edge weights must be strictly positive");
    out.edges_[e].w = weights[e];
  }
  out.finalize();
  return out;
}

void WeightedGraph::finalize() {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n_ + 1, 0);
  for (std::size_t v = 0; v < n_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  adj_.assign(offsets_[n_], Incidence{0, 0});
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    adj_[fill[e.u]++] = {e.v, id};
    adj_[fill[e.v]++] = {e.u, id};
  }
  wdeg_.assign(n_, 0.0);
  for (const auto& e : edges_) {
    wdeg_[e.u] += e.w;
    wdeg_[e.v] += e.w;
  }
  if (clique_.size > 0)
    for (Vertex v = clique_.first; v < clique_.first + clique_.size; ++v) wdeg_[v] += clique_.size - 1.0;
}

GraphBuilder::GraphBuilder(std::size_t n) : n_(n), lookup_(n) {}

Vertex GraphBuilder::add_vertex() { return add_vertices(1); }

Vertex GraphBuilder::add_vertices(std::size_t count) {
  const auto first = static_cast<Vertex>(n_);
  n_ += count;
  lookup_.resize(n_);
  return first;
}

EdgeId GraphBuilder::add_edge(Vertex u, Vertex v, double w, EdgeTag tag) {
  if (u >= n_ || v >= n_) throw Error("edge endpoint out of range");
  if (u == v) throw Error("self-loops are not allowed");
  if (!(w > 0.0)) throw Error("edge weights must be strictly positive");
  if (clique_.contains(u) && clique_.contains(v))
    throw Error("edge duplicates an implicit clique edge");
  const Vertex a = std::min(u, v), b = std::max(u, v);
  for (const auto& [other, id] : lookup_[a]) {
    if (other == b) {
      edges_[id].w += w;
      return id;
    }
  }
  const auto id = static_cast<EdgeId>(edges_.size());
  edges_.push_back({a, b, w});
  tags_.push_back(tag);
  lookup_[a].emplace_back(b, id);
  return id;
}

void GraphBuilder::set_implicit_clique(CliqueBlock block) {
  if (block.size > 0 && block.first + block.size > n_) throw Error("clique block out of range");
  if (block.size == 1) block.size = 0;
  clique_ = block;
  for (const auto& e : edges_)
    if (clique_.contains(e.u) && clique_.contains(e.v))
      throw Error("explicit edge inside the implicit clique");
}

WeightedGraph GraphBuilder::build() && {
  WeightedGraph g;
  g.n_ = n_;
  g.edges_ = std::move(edges_);
  g.tags_ = std::move(tags_);
  g.clique_ = clique_;
  g.finalize();
  return g;
}

WeightedGraph build_basic(BasicShape shape, std::size_t size) {
  if (size == 0) throw Error("build_basic: size must be at least 1");
  switch (shape) {
    case BasicShape::path: {
      GraphBuilder b(size + 1);
      for (Vertex i = 0; i < size; ++i) b.add_edge(i, i + 1);
      return std::move(b).build();
    }
    case BasicShape::complete: {
      GraphBuilder b(size);
      for (Vertex i = 0; i < size; ++i)
        for (Vertex j = i + 1; j < size; ++j) b.add_edge(i, j, 1.0, EdgeTag{EdgeKind::clique});
      return std::move(b).build();
    }
    case BasicShape::binary_tree: {
      if (size > 26) throw Error("binary_tree: depth too large");
      const std::size_t count = (std::size_t{2} << size) - 1;
      GraphBuilder b(count);
      for (Vertex x = 0; 2 * x + 2 < count; ++x) {
        int level = 0;
        for (Vertex y = x + 1; y > 1; y >>= 1) ++level;
        b.add_edge(x, 2 * x + 1, 1.0, EdgeTag{EdgeKind::left, -1, level + 1});
        b.add_edge(x, 2 * x + 2, 1.0, EdgeTag{EdgeKind::right, -1, level + 1});
      }
      return std::move(b).build();
    }
    case BasicShape::cycle: {
      if (size < 3) throw Error("cycle: at least 3 vertices needed for a simple cycle");
      GraphBuilder b(size);
      for (Vertex i = 0; i < size; ++i) b.add_edge(i, static_cast<Vertex>((i + 1) % size));
      return std::move(b).build();
    }
  }
  throw Error("build_basic: unknown shape");
}

WeightedGraph build_star(std::span<const double> weights) {
  GraphBuilder b(weights.size() + 1);
  for (std::size_t i = 0; i < weights.size(); ++i) b.add_edge(0, static_cast<Vertex>(i + 1), weights[i]);
  return std::move(b).build();
}

WeightedGraph stretch_edges(const WeightedGraph& g, std::span<const std::uint32_t> factors) {
  if (factors.size() != g.num_explicit_edges()) throw Error("stretch_edges: one factor per edge required");
  GraphBuilder b(g.n());
  for (EdgeId id = 0; id < g.num_explicit_edges(); ++id) {
    const auto& e = g.edge(id);
    const auto& tag = g.tag(id);
    const std::uint32_t f = factors[id];
    if (f == 0) throw Error("stretch_edges: factor 0 is not allowed");
    if (f == 1) {
      b.add_edge(e.u, e.v, e.w, tag);
      continue;
    }
    Vertex prev = e.u;
    const Vertex first = b.add_vertices(f - 1);
    for (std::uint32_t j = 0; j + 1 < f; ++j) {
      b.add_edge(prev, first + j, 1.0, tag);
      prev = first + j;
    }
    b.add_edge(prev, e.v, 1.0, tag);
  }
  if (g.has_implicit_clique()) b.set_implicit_clique(g.implicit_clique());
  return std::move(b).build();
}

WeightedGraph stretch_edges(const WeightedGraph& g, std::uint32_t factor) {
  std::vector<std::uint32_t> f(g.num_explicit_edges(), factor);
  return stretch_edges(g, f);
}

}  // namespace mixsens
