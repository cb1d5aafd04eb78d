#pragma once

#include <string>
#include <vector>

#include "mixsens/chain.hpp"
#include "mixsens/config.hpp"
#include "mixsens/graph.hpp"
#include "mixsens/result_table.hpp"
#include "mixsens/rng.hpp"

namespace mixsens {

struct CheckResult {
  std::string name;
  std::size_t instances = 0;
  bool pass = true;
  double worst = 0.0;  // largest violation margin or error seen
  std::string detail;  // first failure, if any
  double seconds = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool pass() const;
  ResultTable table() const;
};

/// Connected graph: random spanning tree plus each other pair with
/// probability edge_prob, weights uniform on [wmin, wmax].
WeightedGraph random_weighted_graph(std::size_t n, Rng& rng, double edge_prob = 0.4, double wmin = 0.2,
                                    double wmax = 5.0);

struct CutVertexInstance {
  WeightedGraph graph;
  Vertex v = 0;
  std::vector<Vertex> targets;  // one per component of graph - v
};
CutVertexInstance random_cut_vertex_graph(std::size_t max_vertices, Rng& rng);

/// Random nonempty subset with pi(A) <= 1/2.
std::vector<Vertex> random_small_subset(const ChainSpec& chain, Rng& rng);

/// Unit path on 2N edges with a unit bridge v_{2j} v_{2j+2} for every j.
WeightedGraph bridged_path(std::size_t half_length);

/// Random non-increasing f: {1..depth} -> positive integers.
std::vector<double> random_stretch_function(int depth, Rng& rng);

CheckResult check_bridged_path(const VerifyConfig& cfg);
CheckResult check_conductance_split(const VerifyConfig& cfg, std::uint64_t seed);
CheckResult check_tree_lemma(const VerifyConfig& cfg, std::uint64_t seed);
CheckResult check_cheeger(const VerifyConfig& cfg, std::uint64_t seed);
CheckResult check_restricted_cheeger(const VerifyConfig& cfg, std::uint64_t seed);
CheckResult check_exit_tail(const VerifyConfig& cfg, std::uint64_t seed);
CheckResult check_eigen_compare(const VerifyConfig& cfg, std::uint64_t seed);
CheckResult check_l2_identities(const VerifyConfig& cfg, std::uint64_t seed);

/// Every exact property above; stops at nothing, reports everything.
VerificationReport run_verification_suite(const VerifyConfig& cfg, std::uint64_t seed);

}  // namespace mixsens
