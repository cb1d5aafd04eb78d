#include <algorithm>
#include <cmath>
#include <limits>

#include "mixsens/interchange.hpp"

namespace mixsens {

namespace {

constexpr Vertex kFloat = std::numeric_limits<Vertex>::max();
constexpr std::int32_t kNone = -1;

// Swap-remove index set over small integer ids.
struct IndexSet {
  std::vector<std::uint32_t> items;
  std::vector<std::int32_t> where;

  explicit IndexSet(std::size_t universe = 0) : where(universe, kNone) {}
  std::size_t size() const { return items.size(); }
  bool contains(std::uint32_t v) const { return where[v] != kNone; }
  void insert(std::uint32_t v) {
    where[v] = static_cast<std::int32_t>(items.size());
    items.push_back(v);
  }
  void erase(std::uint32_t v) {
    const auto i = static_cast<std::size_t>(where[v]);
    const auto last = items.back();
    items[i] = last;
    where[last] = static_cast<std::int32_t>(i);
    items.pop_back();
    where[v] = kNone;
  }
  std::uint32_t pick(Rng& rng) const { return items[rng.below(items.size())]; }
};

// A disagreement at position pos: sigma(pos) = a, sigma'(pos) = b. The token
// whose b equals a_t is next(t); a ring on the edge between t and next(t)
// is the only way either of them can be coupled.
class TokenCoupling {
 public:
  TokenCoupling(const WeightedGraph& g, std::span<const std::uint32_t> a, std::span<const std::uint32_t> b)
      : g_(g), n_(g.n()), token_at_(n_, kNone), by_b_(n_, kNone), expl_(n_), flo_(n_), bnd_(n_), bempty_(n_) {
    if (a.size() != n_ || b.size() != n_ || !is_permutation(a) || !is_permutation(b))
      throw Error("coupling: states must be permutations of the graph's vertices");
    const auto& k = g.implicit_clique();
    interior_.assign(n_, 0);
    is_boundary_.assign(n_, 0);
    for (Vertex x = k.first; x < k.first + k.size; ++x) {
      if (g.adjacency(x).empty()) {
        interior_[x] = 1;
        ++n_interior_;
      } else {
        is_boundary_[x] = 1;
        bempty_.insert(x);
        ++n_boundary_;
      }
    }
    wexp_.assign(n_, 0.0);
    for (Vertex x = 0; x < n_; ++x) {
      wexp_[x] = g.explicit_weighted_degree(x);
      wmax_ = std::max(wmax_, wexp_[x]);
    }
    ta_.resize(n_);
    tb_.resize(n_);
    pos_.resize(n_);
    for (Vertex x = 0; x < n_; ++x) {
      if (a[x] == b[x]) continue;
      const auto t = static_cast<std::uint32_t>(x);  // token ids reuse initial positions
      ta_[t] = a[x];
      tb_[t] = b[x];
      by_b_[b[x]] = static_cast<std::int32_t>(t);
      if (interior_[x]) place_float(t);
      else place(t, x);
      ++alive_;
    }
    initial_ = alive_;
  }

  std::size_t alive() const { return alive_; }
  std::size_t initial() const { return initial_; }

  double run(double horizon, Rng& rng, ReducedStats* stats) {
    double t = 0.0;
    std::uint64_t events = 0, proposals = 0;
    while (alive_ > 0) {
      const double e = static_cast<double>(expl_.size());
      const double f = static_cast<double>(flo_.size());
      const double z = static_cast<double>(bnd_.size());
      const double be = static_cast<double>(n_boundary_) - z;
      const double ni = static_cast<double>(n_interior_);
      const double r1 = 2.0 * wmax_ * e;
      const double r2 = f * be;
      const double r3 = z * (ni - f);
      const double r4 = z * be;
      const double r5 = f * z + z * (z - 1.0) / 2.0;
      const double r6 = 2.0 * (f + z);
      const double total = r1 + r2 + r3 + r4 + r5 + r6;
      if (!(total > 0.0)) throw Error("coupling: no event can fire (disconnected graph?)");
      t += rng.exponential(total);
      if (t >= horizon) {
        t = std::numeric_limits<double>::infinity();
        break;
      }
      ++proposals;
      double r = rng.uniform() * total;
      bool changed = false;
      if ((r -= r1) < 0.0) changed = explicit_event(rng);
      else if ((r -= r2) < 0.0) changed = move_float_to_boundary(rng);
      else if ((r -= r3) < 0.0) changed = move_boundary_to_interior(rng);
      else if ((r -= r4) < 0.0) changed = move_boundary_to_boundary(rng);
      else if ((r -= r5) < 0.0) changed = exchange_in_clique(rng, f * z / r5);
      else changed = clique_couple(rng);
      events += changed;
    }
    if (stats) {
      stats->events = events;
      stats->proposals = proposals;
      stats->initial_tokens = initial_;
    }
    return alive_ == 0 ? t : std::numeric_limits<double>::infinity();
  }

 private:
  std::int32_t next(std::uint32_t t) const { return by_b_[ta_[t]]; }
  bool linked(std::uint32_t t, std::uint32_t s) const {
    return next(t) == static_cast<std::int32_t>(s) || next(s) == static_cast<std::int32_t>(t);
  }
  bool in_clique(std::uint32_t t) const { return pos_[t] == kFloat || is_boundary_[pos_[t]]; }

  void place(std::uint32_t t, Vertex x) {
    pos_[t] = x;
    token_at_[x] = static_cast<std::int32_t>(t);
    expl_.insert(t);
    if (is_boundary_[x]) {
      bnd_.insert(t);
      bempty_.erase(x);
    }
  }
  void place_float(std::uint32_t t) {
    pos_[t] = kFloat;
    flo_.insert(t);
  }
  // removes t from whatever position structure holds it; returns the position
  Vertex lift(std::uint32_t t) {
    const Vertex x = pos_[t];
    if (x == kFloat) {
      flo_.erase(t);
      return x;
    }
    token_at_[x] = kNone;
    expl_.erase(t);
    if (is_boundary_[x]) {
      bnd_.erase(t);
      bempty_.insert(x);
    }
    return x;
  }
  void put(std::uint32_t t, Vertex x) {
    if (x == kFloat) place_float(t);
    else place(t, x);
  }

  // s = next(t); survivor carries (a_s, b_t) at pos(t) or pos(s)
  void couple(std::uint32_t t, std::uint32_t s, Rng& rng) {
    const std::uint32_t la = ta_[s], lb = tb_[t];
    const Vertex pt = lift(t), ps = lift(s);
    by_b_[tb_[t]] = kNone;
    by_b_[tb_[s]] = kNone;
    const Vertex keep = rng.coin() ? ps : pt;
    if (la == lb) {
      alive_ -= 2;
      return;
    }
    alive_ -= 1;
    ta_[t] = la;
    tb_[t] = lb;
    by_b_[lb] = static_cast<std::int32_t>(t);
    put(t, keep);
  }

  bool explicit_event(Rng& rng) {
    const std::uint32_t t = expl_.pick(rng);
    const Vertex x = pos_[t];
    if (rng.uniform() * wmax_ >= wexp_[x]) return false;
    double r = rng.uniform() * wexp_[x];
    const auto adj = g_.adjacency(x);
    Vertex y = adj.back().to;
    for (const auto& inc : adj) {
      r -= g_.edge(inc.edge).w;
      if (r < 0.0) {
        y = inc.to;
        break;
      }
    }
    const std::int32_t so = token_at_[y];
    if (so == kNone) {
      if (!rng.coin()) return false;
      lift(t);
      place(t, y);
      return true;
    }
    const auto s = static_cast<std::uint32_t>(so);
    if (linked(t, s)) {
      if (!rng.coin()) return false;
      if (next(t) == so) couple(t, s, rng);
      else couple(s, t, rng);
      return true;
    }
    if (rng.below(4) != 0) return false;
    lift(t);
    lift(s);
    place(t, y);
    place(s, x);
    return true;
  }

  bool move_float_to_boundary(Rng& rng) {
    const std::uint32_t t = flo_.pick(rng);
    const Vertex p = bempty_.pick(rng);
    lift(t);
    place(t, p);
    return true;
  }

  bool move_boundary_to_interior(Rng& rng) {
    const std::uint32_t t = bnd_.pick(rng);
    lift(t);
    place_float(t);
    return true;
  }

  bool move_boundary_to_boundary(Rng& rng) {
    const std::uint32_t t = bnd_.pick(rng);
    const Vertex p = bempty_.pick(rng);
    lift(t);
    place(t, p);
    return true;
  }

  bool exchange_in_clique(Rng& rng, double p_float_pair) {
    if (rng.uniform() < p_float_pair) {
      const std::uint32_t t = flo_.pick(rng);
      const std::uint32_t s = bnd_.pick(rng);
      if (linked(t, s)) return false;
      lift(t);
      const Vertex p = lift(s);
      place(t, p);
      place_float(s);
      return true;
    }
    const std::size_t z = bnd_.size();
    const auto i = rng.below(z);
    auto j = rng.below(z - 1);
    if (j >= i) ++j;
    const std::uint32_t t = bnd_.items[i], s = bnd_.items[j];
    if (linked(t, s)) return false;
    const Vertex p = lift(t), q = lift(s);
    place(t, q);
    place(s, p);
    return true;
  }

  bool clique_couple(Rng& rng) {
    const std::size_t f = flo_.size(), z = bnd_.size();
    if (f + z == 0) return false;
    const auto r = rng.below(f + z);
    const std::uint32_t t = r < f ? flo_.items[r] : bnd_.items[r - f];
    const auto s = static_cast<std::uint32_t>(next(t));
    if (!in_clique(s)) return false;
    if (next(s) == static_cast<std::int32_t>(t) && !rng.coin()) return false;
    couple(t, s, rng);
    return true;
  }

  const WeightedGraph& g_;
  std::size_t n_;
  std::vector<char> interior_, is_boundary_;
  std::size_t n_interior_ = 0, n_boundary_ = 0;
  std::vector<double> wexp_;
  double wmax_ = 0.0;
  std::vector<std::uint32_t> ta_, tb_;
  std::vector<Vertex> pos_;
  std::vector<std::int32_t> token_at_, by_b_;
  IndexSet expl_, flo_, bnd_, bempty_;
  std::size_t alive_ = 0, initial_ = 0;
};

}  // namespace

double couple_reduced(const WeightedGraph& g, std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                      double horizon, Rng& rng, ReducedStats* stats) {
  TokenCoupling c(g, a, b);
  if (c.alive() == 0) {
    if (stats) *stats = {};
    return 0.0;
  }
  return c.run(horizon, rng, stats);
}

}  // namespace mixsens
