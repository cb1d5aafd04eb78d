#pragma once

#include <span>
#include <string>
#include <vector>

#include "mixsens/graph.hpp"

namespace mixsens {

struct SolveInfo {
  double value = 0.0;
  std::string method;  // "dense-lu" or "cg-jacobi"
  double residual = 0.0;
};

inline constexpr std::size_t kDenseSolveLimit = 3000;
inline constexpr double kSolveTolerance = 1e-12;

/// Solves the Dirichlet problem sum_y w(xy)(v(x) - v(y)) = current(x) off the
/// boundary with v fixed on it. Returns the full potential vector; info gets
/// the method and the max equation residual.
std::vector<double> solve_potential(const WeightedGraph& g, std::span<const Vertex> boundary,
                                    std::span<const double> boundary_values,
                                    std::span<const double> current, SolveInfo* info = nullptr);

/// Column j: Pr_x[first hit of the boundary is at boundary[j]], for every x.
/// Factorizes once for all columns.
std::vector<std::vector<double>> harmonic_measures(const WeightedGraph& g, std::span<const Vertex> boundary,
                                                   SolveInfo* info = nullptr);

SolveInfo effective_resistance(const WeightedGraph& g, Vertex a, Vertex b);

struct SplitResult {
  std::vector<double> conductances;     // C_i, v to w_i inside its component
  std::vector<double> conductance_law;  // C_i / sum C_j
  std::vector<double> absorption;       // direct Pr_v[hit targets first at w_i]
  double max_difference = 0.0;
};

/// Requires that removing v puts every target in its own component.
SplitResult hitting_split(const WeightedGraph& g, Vertex v, std::span<const Vertex> targets);

/// Collapsed-level network for a binary tree whose level-i edges are stretched
/// by f(i) (f[i-1] holds f(i), i = 1..D): probability that the walk from level
/// h hits the root before depth D.
double stretched_tree_root_hit(std::span<const double> f, int h, int depth_cutoff);

/// Eliminates every vertex outside keep by series merges and dangling-vertex
/// removal (parallel edges merge additively). Vertex j of the result is keep[j].
WeightedGraph reduce_series_parallel(const WeightedGraph& g, std::span<const Vertex> keep);

}  // namespace mixsens
