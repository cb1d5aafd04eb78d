#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixsens/alias.hpp"
#include "mixsens/chain.hpp"
#include "mixsens/graph.hpp"
#include "mixsens/rng.hpp"
#include "mixsens/stats.hpp"
#include "mixsens/walkers.hpp"

namespace mixsens {

bool is_permutation(std::span<const std::uint32_t> p);
/// 0 for even, 1 for odd.
int permutation_parity(std::span<const std::uint32_t> p);
std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng);

/// sigma: position -> particle label; sigma_inv: label -> position.
struct InterchangeState {
  std::vector<std::uint32_t> sigma;
  std::vector<std::uint32_t> sigma_inv;

  static InterchangeState identity(std::size_t n);
  static InterchangeState from_permutation(std::vector<std::uint32_t> sigma);

  std::size_t n() const { return sigma.size(); }
  void swap_positions(Vertex x, Vertex y) {
    std::swap(sigma[x], sigma[y]);
    sigma_inv[sigma[x]] = x;
    sigma_inv[sigma[y]] = y;
  }
  bool consistent() const;
};

/// Aggregate clock over all edges (explicit plus implicit clique): one
/// exponential for the next ring, alias-table choice of the edge.
class EdgeClock {
 public:
  explicit EdgeClock(const WeightedGraph& g);

  double total_rate() const { return total_; }
  struct Ring {
    Vertex x;
    Vertex y;
    EdgeId edge;  // kCliqueEdge for implicit clique edges
  };
  Ring sample(Rng& rng) const;

 private:
  const WeightedGraph* g_;
  AliasTable table_;  // explicit edges, then one bucket for the clique
  double clique_weight_ = 0.0;
  double total_ = 0.0;
};

struct ParticleObserver {
  std::uint32_t label;
  const VertexMask* hit_set = nullptr;
  const VertexMask* tally_set = nullptr;
};

struct TrackedParticle {
  std::uint32_t label;
  double first_hit = std::numeric_limits<double>::quiet_NaN();
  double tally = 0.0;
  Vertex final_position = 0;
};

struct InterchangeRecord {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t events = 0;
  std::uint64_t watched_swaps = 0;
  std::vector<TrackedParticle> tracked;
  InterchangeState final_state;
};

struct InterchangeOptions {
  double horizon = 1.0;
  std::vector<ParticleObserver> observers;
  std::optional<EdgeId> watch_edge;
  bool check_invariants = false;
};

InterchangeRecord simulate_interchange(const WeightedGraph& g, const InterchangeState& init,
                                       const InterchangeOptions& options, std::uint64_t seed,
                                       std::uint64_t trial = 0);

struct CouplingOptions {
  double horizon = std::numeric_limits<double>::infinity();
  bool stop_at_coalescence = true;
  std::optional<EdgeId> watch_edge;
  bool check_invariants = false;
};

struct CouplingResult {
  bool coalesced = false;
  double coalescence_time = std::numeric_limits<double>::infinity();
  std::uint64_t rings = 0;
  std::size_t initial_disagreement = 0;
  bool monotone = true;
  std::uint64_t watched_swaps_a = 0;
  std::uint64_t watched_swaps_b = 0;
  InterchangeState final_a;
  InterchangeState final_b;
};

/// Edges ring at rate 2w. On a ring at xy: if sigma(x) = sigma'(y) or
/// sigma(y) = sigma'(x), swap in sigma only or in sigma' only (fair coin);
/// otherwise swap in both or in neither (fair coin).
CouplingResult couple_interchange(const WeightedGraph& g, const InterchangeState& a, const InterchangeState& b,
                                  const CouplingOptions& options, Rng& rng);

struct ReducedStats {
  std::uint64_t events = 0;
  std::uint64_t proposals = 0;
  std::size_t initial_tokens = 0;
};

/// Same joint law of the coalescence time as couple_interchange, simulated on
/// disagreement tokens only; interior clique positions are exchangeable and
/// their tokens are kept as an anonymous pool.
double couple_reduced(const WeightedGraph& g, std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                      double horizon, Rng& rng, ReducedStats* stats = nullptr);

enum class CouplingKernel { literal, reduced };
CouplingKernel coupling_kernel_from_string(std::string_view name);
std::string_view to_string(CouplingKernel k);

struct MixUpper {
  double t_up = std::numeric_limits<double>::infinity();  // infinite when not certified
  std::size_t order = 0;  // index k of the order statistic used (1-based)
  double quantile = 0.75;
  double confidence = 0.99;
  double lower_bound = 0.0;  // one-sided lower bound on Pr[T <= t_up]
  std::vector<double> times;  // per trial, infinite when not coalesced by the horizon
};

/// sigma = id, sigma' uniform per trial. t_up is the smallest order statistic
/// T_(k) whose one-sided lower confidence bound on k/N reaches q.
MixUpper coupling_mix_upper(const WeightedGraph& g, std::size_t trials, double q, std::uint64_t seed,
                            CouplingKernel kernel = CouplingKernel::reduced,
                            double horizon = std::numeric_limits<double>::infinity(), double confidence = 0.99);

/// max(0, lower confidence bound on p - pi(A)).
double tv_lower_from_event(std::uint64_t successes, std::uint64_t trials, double pi_a, double confidence = 0.99);

// --- exact chain on S_n ---------------------------------------------------

std::uint32_t rank_permutation(std::span<const std::uint32_t> p);
std::vector<std::uint32_t> unrank_permutation(std::uint32_t rank, std::size_t n);

struct ExactInterchange {
  std::size_t n = 0;
  std::size_t states = 0;
  std::size_t edges = 0;
  std::vector<double> coeff;         // r_e / Lambda
  std::vector<std::uint32_t> nbr;    // nbr[s * edges + e] = rank(s o tau_e)
  double total_rate = 0.0;           // Lambda = sum_e r_e
};

ExactInterchange build_exact_interchange(const WeightedGraph& g, std::size_t max_n = 5);

/// out = M in with M = sum_e (r_e / Lambda) tau_e.
void exact_apply(const ExactInterchange& ex, const std::vector<double>& in, std::vector<double>& out, bool parallel);

double tv_to_uniform(const std::vector<double>& p);

/// TV from the identity start at each time (lazy chains use integer steps).
std::vector<double> exact_tv_curve(const ExactInterchange& ex, Timebase tb, std::span<const double> times,
                                   bool parallel = true);
/// First time with TV <= threshold (bisection to 1e-9 in continuous time).
double exact_mixing_time(const ExactInterchange& ex, Timebase tb, double threshold = 0.25, bool parallel = true);

struct TimebaseRatio {
  double lazy = 0.0;       // 1/2-lazy jump chain, steps
  double continuous = 0.0;  // generator Lambda (M - I)
  double ratio = 0.0;       // Lambda * continuous / lazy, nan if lazy == 0
  bool in_range = false;    // ratio within [1/10, 10]
};

TimebaseRatio exact_timebase_ratio(const ExactInterchange& ex, double threshold = 0.25, bool parallel = true);

}  // namespace mixsens
