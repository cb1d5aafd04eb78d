#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "mixsens/graph.hpp"

namespace mixsens {

enum class Timebase { lazy, continuous };

std::string_view to_string(Timebase tb);
Timebase timebase_from_string(std::string_view name);

/// Reversible chain of a weighted graph.
///  lazy:       P(x,x) = 1/2, P(x,y) = w(xy) / (2 deg_w(x)), pi ∝ deg_w
///  continuous: L(x,y) = w(xy), L(x,x) = -deg_w(x), pi uniform
struct ChainSpec {
  std::shared_ptr<const WeightedGraph> graph;
  Timebase timebase = Timebase::lazy;
  std::vector<double> pi;
  std::vector<double> total_rate;  // deg_w(x), implicit clique included

  std::size_t n() const { return pi.size(); }
  /// P(x,y) for lazy chains, L(x,y) for continuous ones.
  double entry(Vertex x, Vertex y) const;
  /// pi(x) P(x,y) or pi(x) L(x,y) for x != y.
  double flow(Vertex x, Vertex y) const { return pi[x] * entry(x, y); }
};

ChainSpec derive_chain(std::shared_ptr<const WeightedGraph> g, Timebase tb);
ChainSpec derive_chain(const WeightedGraph& g, Timebase tb);

/// Dense P (lazy) or L (continuous).
Eigen::MatrixXd dense_kernel(const ChainSpec& chain);
/// Dense I - P (lazy) or -L (continuous).
Eigen::MatrixXd dense_operator(const ChainSpec& chain);

}  // namespace mixsens
