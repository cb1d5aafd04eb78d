#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixsens/chain.hpp"
#include "mixsens/gadget.hpp"
#include "mixsens/rng.hpp"

namespace mixsens {

/// Membership mask over the chain's vertices.
using VertexMask = std::vector<char>;

struct WalkOptions {
  double horizon = std::numeric_limits<double>::infinity();  // time units, or steps for lazy chains
  const VertexMask* stop_set = nullptr;
  std::vector<const VertexMask*> tally_sets;
  std::vector<double> observe_times;  // ascending
  bool record_events = false;
  bool timeout_is_error = false;
  /// Interior clique vertices (no explicit edges) are exchangeable; simulate
  /// them as one lumped state. Exact in law, much faster for large cliques.
  bool lump_clique = true;
};

struct WalkTrace {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  Vertex start = 0;
  bool hit = false;
  double hit_time = std::numeric_limits<double>::quiet_NaN();
  double end_time = 0.0;
  Vertex end_vertex = 0;
  std::uint64_t jumps = 0;
  std::vector<double> tallies;
  std::vector<Vertex> observed;
  std::vector<std::pair<double, Vertex>> events;
};

/// Precomputed sampler for one chain and option set, reusable across trials.
class Walker {
 public:
  Walker(const ChainSpec& chain, WalkOptions options);

  WalkTrace run(Vertex start, std::uint64_t seed, std::uint64_t trial) const;
  WalkTrace run(Vertex start, Rng& rng) const;

  const ChainSpec& chain() const { return *chain_; }
  bool lumped() const { return lumped_; }

 private:
  static constexpr Vertex kLump = std::numeric_limits<Vertex>::max();

  double hold(Vertex v, Rng& rng) const;
  Vertex jump(Vertex v, Rng& rng) const;
  Vertex concrete(Vertex v, Rng& rng) const;
  bool member(const VertexMask& m, Vertex v) const { return v == kLump ? m[interior_.front()] != 0 : m[v] != 0; }

  const ChainSpec* chain_;
  WalkOptions opt_;
  bool lumped_ = false;
  std::vector<Vertex> attached_;          // clique vertices with explicit edges
  std::vector<std::uint32_t> attached_pos_;
  std::vector<Vertex> interior_;          // clique vertices without explicit edges
  std::vector<char> is_interior_;
};

WalkTrace simulate_walk(const ChainSpec& chain, Vertex start, const WalkOptions& options, std::uint64_t seed,
                        std::uint64_t trial = 0);

struct ExitStart {
  std::string kind;  // root | top-mid | deep-mid
  Vertex vertex;
  double mean;
  double stderr_mean;
  double q50;
  double q99;
  double max;
  std::vector<double> samples;
};

struct ExitStats {
  int stage;  // 1-based
  double scale;  // l_i^2 s_i
  std::vector<ExitStart> starts;
  double worst_mean;
  double ratio;  // worst_mean / scale
};

/// Exit time of H_i (first hit of its complement), continuous time.
ExitStats exit_time_stats(const GadgetGraph& g, int stage, std::size_t trials, std::uint64_t seed);

/// g at the last visit to level k before the walk first reaches depth k+margin,
/// on a binary tree whose left-child edges have weight 1+delta. counts[j] is
/// the number of trials with g = j.
std::vector<std::uint64_t> biased_level_statistic(double delta, int k, std::size_t trials, int depth_margin,
                                                  std::uint64_t seed);
/// Pr[left step] of the limiting law: sqrt(1+delta) / (1 + sqrt(1+delta)).
double biased_left_probability(double delta);

struct CliqueTimeReport {
  double horizon;
  std::vector<double> min_fraction;  // per trial, min over starts of N(x)/T
  double fraction_above;             // share of trials with min > 2/3
};

/// N(x)/T for walkers from every gadget vertex (and one interior clique vertex).
CliqueTimeReport time_in_clique(const GadgetGraph& g, double horizon, std::size_t trials, std::uint64_t seed,
                                std::size_t start_stride = 1);

struct TraversalTrial {
  double t_k;                 // hitting time of K from the root
  std::vector<char> reached;  // reached[i]: entered B_i before T_K
};

/// Root particle of H_1 walking until it hits K (continuous time).
std::vector<TraversalTrial> root_particle_traversal(const GadgetGraph& g, std::size_t trials, std::uint64_t seed,
                                                    double horizon = std::numeric_limits<double>::infinity());

/// Pr[root particle in the gadget at t] for each t, by independent walks.
std::vector<std::uint64_t> root_in_gadget_counts(const GadgetGraph& g, std::span<const double> times,
                                                 std::size_t trials, std::uint64_t seed);

}  // namespace mixsens
