#include "mixsens/interchange.hpp"

#include <algorithm>
#include <cmath>

#include "mixsens/parallel.hpp"

namespace mixsens {

bool is_permutation(std::span<const std::uint32_t> p) {
  std::vector<char> seen(p.size(), 0);
  for (auto v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

int permutation_parity(std::span<const std::uint32_t> p) {
  if (!is_permutation(p)) throw Error("parity: not a permutation");
  std::vector<char> seen(p.size(), 0);
  std::size_t cycles = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = p[j]) seen[j] = 1;
  }
  return static_cast<int>((p.size() - cycles) % 2);
}

std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

InterchangeState InterchangeState::identity(std::size_t n) {
  InterchangeState s;
  s.sigma.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.sigma[i] = static_cast<std::uint32_t>(i);
  s.sigma_inv = s.sigma;
  return s;
}

InterchangeState InterchangeState::from_permutation(std::vector<std::uint32_t> sigma) {
  if (!is_permutation(sigma)) throw Error("interchange: initial state is not a permutation");
  InterchangeState s;
  s.sigma = std::move(sigma);
  s.sigma_inv.resize(s.sigma.size());
  for (std::size_t x = 0; x < s.sigma.size(); ++x) s.sigma_inv[s.sigma[x]] = static_cast<std::uint32_t>(x);
  return s;
}

bool InterchangeState::consistent() const {
  if (sigma.size() != sigma_inv.size()) return false;
  for (std::size_t x = 0; x < sigma.size(); ++x)
    if (sigma[x] >= sigma.size() || sigma_inv[sigma[x]] != x) return false;
  return true;
}

namespace {

std::vector<double> clock_weights(const WeightedGraph& g) {
  std::vector<double> w;
  w.reserve(g.num_explicit_edges() + 1);
  for (const auto& e : g.edges()) w.push_back(e.w);
  const double k = g.implicit_clique().size;
  w.push_back(k * (k - 1.0) / 2.0);
  return w;
}

}  // namespace

EdgeClock::EdgeClock(const WeightedGraph& g) : g_(&g) {
  const auto w = clock_weights(g);
  clique_weight_ = w.back();
  table_ = AliasTable(w);
  total_ = table_.total();
}

EdgeClock::Ring EdgeClock::sample(Rng& rng) const {
  const auto idx = table_.sample(rng);
  if (idx < g_->num_explicit_edges()) {
    const auto& e = g_->edge(idx);
    return {e.u, e.v, idx};
  }
  const auto& k = g_->implicit_clique();
  const auto x = static_cast<Vertex>(rng.below(k.size));
  auto y = static_cast<Vertex>(rng.below(k.size - 1));
  if (y >= x) ++y;
  return {k.first + x, k.first + y, kCliqueEdge};
}

InterchangeRecord simulate_interchange(const WeightedGraph& g, const InterchangeState& init,
                                       const InterchangeOptions& opt, std::uint64_t seed, std::uint64_t trial) {
  if (!(opt.horizon > 0.0)) throw Error("interchange: horizon must be positive");
  if (init.n() != g.n() || !init.consistent()) throw Error("interchange: initial state is not a valid permutation");
  const EdgeClock clock(g);
  Rng rng(seed, trial);
  InterchangeRecord rec;
  rec.seed = seed;
  rec.trial = trial;
  rec.final_state = init;
  auto& st = rec.final_state;
  std::vector<int> tracker(g.n(), -1);
  std::vector<double> last;
  for (const auto& ob : opt.observers) {
    if (ob.label >= g.n()) throw Error("interchange: observed label out of range");
    tracker[ob.label] = static_cast<int>(rec.tracked.size());
    TrackedParticle tp{ob.label};
    const Vertex p = st.sigma_inv[ob.label];
    if (ob.hit_set && (*ob.hit_set)[p]) tp.first_hit = 0.0;
    rec.tracked.push_back(tp);
    last.push_back(0.0);
  }
  auto moved = [&](std::uint32_t label, Vertex from, Vertex to, double t) {
    const int k = tracker[label];
    if (k < 0) return;
    const auto& ob = opt.observers[static_cast<std::size_t>(k)];
    auto& tp = rec.tracked[static_cast<std::size_t>(k)];
    if (ob.tally_set && (*ob.tally_set)[from]) tp.tally += t - last[static_cast<std::size_t>(k)];
    last[static_cast<std::size_t>(k)] = t;
    if (ob.hit_set && (*ob.hit_set)[to] && std::isnan(tp.first_hit)) tp.first_hit = t;
  };
  double t = 0.0;
  while (true) {
    t += rng.exponential(clock.total_rate());
    if (t >= opt.horizon) break;
    const auto r = clock.sample(rng);
    const auto lx = st.sigma[r.x], ly = st.sigma[r.y];
    st.swap_positions(r.x, r.y);
    moved(lx, r.x, r.y, t);
    moved(ly, r.y, r.x, t);
    ++rec.events;
    if (opt.watch_edge && r.edge == *opt.watch_edge) ++rec.watched_swaps;
    if (opt.check_invariants && !st.consistent()) throw Error("interchange: sigma/sigma_inv out of sync");
  }
  for (std::size_t k = 0; k < rec.tracked.size(); ++k) {
    auto& tp = rec.tracked[k];
    tp.final_position = st.sigma_inv[tp.label];
    if (opt.observers[k].tally_set && (*opt.observers[k].tally_set)[tp.final_position])
      tp.tally += opt.horizon - last[k];
  }
  return rec;
}

CouplingResult couple_interchange(const WeightedGraph& g, const InterchangeState& a, const InterchangeState& b,
                                  const CouplingOptions& opt, Rng& rng) {
  if (a.n() != g.n() || b.n() != g.n() || !a.consistent() || !b.consistent())
    throw Error("coupling: states must be permutations of the graph's vertices");
  const EdgeClock clock(g);
  CouplingResult r;
  r.final_a = a;
  r.final_b = b;
  auto& sa = r.final_a;
  auto& sb = r.final_b;
  std::size_t d = 0;
  for (std::size_t x = 0; x < g.n(); ++x) d += sa.sigma[x] != sb.sigma[x];
  r.initial_disagreement = d;
  if (d == 0) {
    r.coalesced = true;
    r.coalescence_time = 0.0;
    if (opt.stop_at_coalescence) return r;
  }
  const double rate = 2.0 * clock.total_rate();
  double t = 0.0;
  while (true) {
    t += rng.exponential(rate);
    if (t >= opt.horizon) break;
    const auto ring = clock.sample(rng);
    const Vertex x = ring.x, y = ring.y;
    ++r.rings;
    const std::size_t before = (sa.sigma[x] != sb.sigma[x]) + (sa.sigma[y] != sb.sigma[y]);
    const bool cross = sa.sigma[x] == sb.sigma[y] || sa.sigma[y] == sb.sigma[x];
    const bool coin = rng.coin();
    bool swap_a, swap_b;
    if (cross) {
      swap_a = coin;
      swap_b = !coin;
    } else {
      swap_a = swap_b = coin;
    }
    if (swap_a) sa.swap_positions(x, y);
    if (swap_b) sb.swap_positions(x, y);
    if (opt.watch_edge && ring.edge == *opt.watch_edge) {
      r.watched_swaps_a += swap_a;
      r.watched_swaps_b += swap_b;
    }
    const std::size_t after = (sa.sigma[x] != sb.sigma[x]) + (sa.sigma[y] != sb.sigma[y]);
    if (after > before) r.monotone = false;
    d = d + after - before;
    if (opt.check_invariants && (!sa.consistent() || !sb.consistent()))
      throw Error("coupling: sigma/sigma_inv out of sync");
    if (d == 0 && !r.coalesced) {
      r.coalesced = true;
      r.coalescence_time = t;
      if (opt.stop_at_coalescence) break;
    }
  }
  return r;
}

CouplingKernel coupling_kernel_from_string(std::string_view name) {
  if (name == "literal") return CouplingKernel::literal;
  if (name == "reduced") return CouplingKernel::reduced;
  throw Error("unknown coupling kernel '" + std::string(name) + "' (expected literal|reduced)");
}

std::string_view to_string(CouplingKernel k) { return k == CouplingKernel::literal ? "literal" : "reduced"; }

MixUpper coupling_mix_upper(const WeightedGraph& g, std::size_t trials, double q, std::uint64_t seed,
                            CouplingKernel kernel, double horizon, double confidence) {
  if (trials == 0) throw Error("mix-upper: need at least one trial");
  if (!(q > 0.0 && q < 1.0)) throw Error("mix-upper: quantile must lie in (0, 1)");
  if (!g.is_connected()) throw Error("mix-upper: graph is disconnected");
  MixUpper m;
  m.quantile = q;
  m.confidence = confidence;
  const auto id = InterchangeState::identity(g.n());
  m.times = run_trials<double>(trials, [&](std::size_t t) {
    Rng rng(seed, t);
    auto other = random_permutation(g.n(), rng);
    if (kernel == CouplingKernel::reduced) return couple_reduced(g, id.sigma, other, horizon, rng);
    CouplingOptions opt;
    opt.horizon = horizon;
    return couple_interchange(g, id, InterchangeState::from_permutation(std::move(other)), opt, rng)
        .coalescence_time;
  });
  std::vector<double> sorted = m.times;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 1; k <= trials; ++k) {
    const double lb = binomial_lower_bound(k, trials, confidence);
    if (lb >= q) {
      m.order = k;
      m.lower_bound = lb;
      m.t_up = sorted[k - 1];
      break;
    }
  }
  return m;
}

double tv_lower_from_event(std::uint64_t successes, std::uint64_t trials, double pi_a, double confidence) {
  if (trials == 0) throw Error("tv lower bound: no trials");
  if (successes > trials) throw Error("tv lower bound: more successes than trials");
  return std::max(0.0, binomial_lower_bound(successes, trials, confidence) - pi_a);
}

}  // namespace mixsens
