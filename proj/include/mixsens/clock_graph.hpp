#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixsens/graph.hpp"
#include "mixsens/rng.hpp"
#include "mixsens/stats.hpp"

namespace mixsens {

/// Auxiliary graph H: 2^m binary trees of depth 4m rooted at B, leaves
/// labeled tree-contiguously by [2^{5m}], layers A_1..A_{5m} above them with
/// W = A_{5m}. A is the first |E(target)| roots, tau the id-order bijection
/// onto the target's edges.
struct ClockAuxGraph {
  int m = 1;
  WeightedGraph graph;
  WeightedGraph target;
  std::vector<Vertex> B;
  std::vector<Vertex> W;
  std::vector<Vertex> A;
  std::vector<EdgeId> tau;            // tau[j] is the target edge of A[j]
  std::vector<std::int32_t> a_index;  // index into A, -1 elsewhere
  std::vector<std::int16_t> layer;    // l for A_l, 0 on the trees
  std::vector<std::int16_t> depth;    // tree depth, -1 on the layers
  std::vector<std::size_t> layer_sizes;  // |A_1| .. |A_{5m}|

  std::size_t n() const { return graph.n(); }
};

/// Default target graph: a path with 2^m edges.
ClockAuxGraph build_clock_aux(int m, std::optional<WeightedGraph> target = std::nullopt,
                              std::size_t max_vertices = 3'000'000);

struct ProductState {
  Vertex x;
  std::vector<std::uint32_t> sigma;  // over the target's vertices
};

/// One step of the chain on H x S_n. Outside A: uniform neighbor step. At
/// a in A: stay and apply tau_a with probability q = boost / (1 + boost)
/// (q = 1/2 unperturbed), otherwise a uniform neighbor step.
/// Returns true when sigma changed.
bool product_chain_step(const ClockAuxGraph& h, ProductState& state, Rng& rng, double swap_boost = 1.0);

struct UniformHitting {
  double max_error = 0.0;  // max over w in W, b in B of |Pr_w[X_{T_B} = b] - 1/|B||
  std::string method;
  double residual = 0.0;
};
UniformHitting uniform_hitting_check(const ClockAuxGraph& h);

/// Expected T_{B \ {h}} for the simple random walk, exact by linear solve.
std::vector<double> exact_hitting_times_to_B(const ClockAuxGraph& h, std::span<const Vertex> starts);
/// Monte Carlo T_{B \ {h}} samples for each start.
std::vector<RunningStats> sampled_hitting_times_to_B(const ClockAuxGraph& h, std::span<const Vertex> starts,
                                                     std::size_t trials, std::uint64_t seed);

/// Pr[R]: return to a before hitting W, under the conditioning that the walk
/// reaches W before B \ {a}.
double return_probability(const ClockAuxGraph& h, Vertex a);

/// 1 - q / (1 + q - (1 - q) Pr[R]).
double p_even_formula(double q, double p_return);

struct PEvenEstimate {
  std::uint64_t even = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;  // runs that hit B \ {a} before W
  double p_hat() const { return accepted ? static_cast<double>(even) / static_cast<double>(accepted) : 0.0; }
  double stderr_p() const;
};

/// Parity of the number of swaps made at a before the walk from a hits W.
PEvenEstimate p_even_monte_carlo(const ClockAuxGraph& h, Vertex a, double swap_boost, std::size_t trials,
                                 std::uint64_t seed);

struct ReturnRecord {
  std::uint64_t step;
  Vertex b;
  std::uint32_t sigma_rank;
  std::uint64_t swaps;
};

/// Runs the product chain from x (sigma = id) and records sigma at each
/// return to B that follows a visit to W.
std::vector<ReturnRecord> product_chain_smoke(const ClockAuxGraph& h, Vertex start, std::uint64_t steps,
                                              std::uint64_t seed, double swap_boost = 1.0);

}  // namespace mixsens
