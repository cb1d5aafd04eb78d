#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixsens {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr EdgeId kCliqueEdge = std::numeric_limits<EdgeId>::max();

enum class EdgeKind : std::uint8_t { plain, left, right, bridge, clique };

std::string_view to_string(EdgeKind kind);
EdgeKind edge_kind_from_string(std::string_view name);

struct EdgeTag {
  EdgeKind kind = EdgeKind::plain;
  int stage = -1;  // -1 when absent
  int level = -1;

  friend bool operator==(const EdgeTag&, const EdgeTag&) = default;
};

struct Edge {
  Vertex u;
  Vertex v;
  double w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Incidence {
  Vertex to;
  EdgeId edge;
};

// A complete unit-weight graph on the contiguous id range [first, first+size)
// that is not materialized edge by edge.
struct CliqueBlock {
  Vertex first = 0;
  Vertex size = 0;

  bool contains(Vertex v) const { return v >= first && v - first < size; }
  friend bool operator==(const CliqueBlock&, const CliqueBlock&) = default;
};

class GraphBuilder;

/// Immutable weighted simple graph. Edge metadata (tags) is kept in a
/// parallel array so hot loops only touch adjacency and weights.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  std::size_t n() const { return n_; }
  std::size_t num_explicit_edges() const { return edges_.size(); }
  /// Includes the implicit clique edges, if any.
  std::size_t num_edges() const;

  std::span<const Edge> edges() const { return edges_; }
  std::span<const EdgeTag> tags() const { return tags_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const EdgeTag& tag(EdgeId e) const { return tags_[e]; }

  /// Explicit incident edges only.
  std::span<const Incidence> adjacency(Vertex v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }

  /// Sum of incident weights, implicit clique included.
  double weighted_degree(Vertex v) const { return wdeg_[v]; }
  double explicit_weighted_degree(Vertex v) const;
  double total_weight() const;

  bool has_implicit_clique() const { return clique_.size > 0; }
  const CliqueBlock& implicit_clique() const { return clique_; }

  /// Weight of edge uv, 0 if absent. Linear in deg(u).
  double weight_between(Vertex u, Vertex v) const;
  std::optional<EdgeId> find_edge(Vertex u, Vertex v) const;

  bool is_connected() const;

  /// Copy with the implicit clique turned into ordinary tagged edges.
  WeightedGraph materialized() const;

  /// Same vertex set and tags, new weights (one per explicit edge).
  WeightedGraph with_weights(std::span<const double> weights) const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.tags_ == b.tags_ && a.clique_ == b.clique_;
  }

 private:
  friend class GraphBuilder;
  void finalize();

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<EdgeTag> tags_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> adj_;
  std::vector<double> wdeg_;
  CliqueBlock clique_;
};

/// Accumulates edges; parallel edges merge by adding weights (the first tag
/// wins). Self-loops and non-positive weights are rejected.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n = 0);

  Vertex add_vertex();
  Vertex add_vertices(std::size_t count);  // returns the first new id
  std::size_t n() const { return n_; }

  EdgeId add_edge(Vertex u, Vertex v, double w = 1.0, EdgeTag tag = {});
  void set_implicit_clique(CliqueBlock block);

  WeightedGraph build() &&;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<EdgeTag> tags_;
  std::vector<std::vector<std::pair<Vertex, EdgeId>>> lookup_;
  CliqueBlock clique_;
};

enum class BasicShape { path, complete, binary_tree, cycle };

/// path(L): L edges; complete(k): k vertices; binary_tree(d): depth d with
/// heap numbering (children of x are 2x+1 left and 2x+2 right); cycle(L): L
/// vertices. Unit weights throughout.
WeightedGraph build_basic(BasicShape shape, std::size_t size);

WeightedGraph build_star(std::span<const double> weights);

/// Replace edge e by a unit-weight path of factors[e] edges. New interior
/// vertices are appended after the original ids and inherit the edge tag.
WeightedGraph stretch_edges(const WeightedGraph& g, std::span<const std::uint32_t> factors);
WeightedGraph stretch_edges(const WeightedGraph& g, std::uint32_t factor);

// Line-oriented text format: "n <count>", optional "clique <first> <size>",
// then "u v w kind [stage] [level]" per explicit edge.
std::string to_graph_text(const WeightedGraph& g);
WeightedGraph graph_from_text(std::string_view text);
void save_graph(const WeightedGraph& g, const std::string& path);
WeightedGraph load_graph(const std::string& path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view s);

}  // namespace mixsens
