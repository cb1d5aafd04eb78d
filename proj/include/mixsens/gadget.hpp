#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixsens/graph.hpp"

namespace mixsens {

/// Stage schedule and clique sizing for the gadget construction.
struct GadgetSpec {
  int u = 2;
  double eps = 0.2;
  std::vector<std::uint32_t> depths;     // s_1..s_u
  std::vector<std::uint32_t> stretches;  // l_1..l_u
  std::string schedule = "custom";
  std::optional<std::size_t> clique_size;
  double clique_mult = 4.0;
  std::size_t max_vertices = 20'000'000;

  /// paper: s_i = 4^{i-1} u, l_i = 2^{u+1-i}
  /// mini:  s_i = 2^{i-1} u, l_i = 2^{u+1-i}
  /// desk:  s_i = 3,         l_i = 2^{ceil((u+1-i)/2)}
  static GadgetSpec preset(const std::string& name, int u, double eps);
  void validate() const;
  double bad_threshold(int stage) const { return (0.5 + eps) * depths[static_cast<std::size_t>(stage)]; }
};

struct StageSize {
  double trees;
  double bad_per_tree;
  double vertices;  // new vertices contributed by the stage
};

/// Vertex counts implied by a spec without building anything.
struct SizeReport {
  std::vector<StageSize> stages;
  double gadget;  // |H_1 ∪ ... ∪ H_u|
  double boundary;
  double clique;
  double total;
};
SizeReport size_report(const GadgetSpec& spec);

/// One stretched tree edge: vertices path_vertices[offset .. offset+length].
struct StretchedPath {
  EdgeKind kind;
  int stage;
  int level;
  std::uint32_t offset;
  std::uint32_t length;
};

/// Vertex numbering: non-clique gadget vertices first, then the fused leaves
/// (boundary of K), then the remaining clique vertices. K is stored as the
/// graph's implicit clique.
struct GadgetGraph {
  WeightedGraph graph;
  GadgetSpec spec;
  std::optional<std::uint64_t> labeling_seed;
  bool bridged = false;
  double delta = 0.0;

  std::vector<std::vector<Vertex>> stages;      // H_i
  std::vector<std::vector<Vertex>> roots;       // roots of H_i
  std::vector<std::vector<Vertex>> leaves;      // leaves of H_i
  std::vector<std::vector<Vertex>> bad_leaves;  // B_i
  Vertex root = 0;

  Vertex k_first = 0;          // first vertex of K
  std::size_t k_boundary = 0;  // |∂K|, fused leaves
  std::size_t k_size = 0;      // |K|

  std::vector<std::int16_t> stage_of;  // lowest stage containing v, -1 outside the gadget
  std::vector<std::int16_t> level_of;  // tree level of branch vertices, -1 otherwise
  std::vector<std::int16_t> g_of;      // left-edge count from the stage root, branch vertices only

  std::vector<Vertex> path_vertices;
  std::vector<StretchedPath> paths;

  std::size_t n() const { return graph.n(); }
  std::size_t gadget_size() const { return k_first + k_boundary; }
  bool in_K(Vertex v) const { return v >= k_first; }
  bool in_gadget(Vertex v) const { return v < k_first + k_boundary; }
  std::span<const Vertex> path(const StretchedPath& p) const {
    return {path_vertices.data() + p.offset, p.length + 1u};
  }
};

GadgetGraph build_gadget(const GadgetSpec& spec, std::optional<std::uint64_t> labeling_seed = std::nullopt);

/// Adds unit bridges v_{2j} v_{2j+2} on every left path.
GadgetGraph perturb_bridges(const GadgetGraph& g);
/// Sets every left edge's weight to 1 + delta.
GadgetGraph perturb_weights(const GadgetGraph& g, double delta);

/// Recomputes B_i by walking every root-to-leaf path and counting left tags.
std::vector<std::vector<Vertex>> recompute_bad_leaves(const GadgetGraph& g);

std::string gadget_to_json(const GadgetGraph& g, bool include_sets = true);
GadgetGraph gadget_from_json(const std::string& text);
std::string spec_to_json(const GadgetSpec& spec);
GadgetSpec spec_from_json(const std::string& text);

}  // namespace mixsens
