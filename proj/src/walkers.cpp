#include "mixsens/walkers.hpp"

#include <algorithm>
#include <cmath>

#include "mixsens/parallel.hpp"
#include "mixsens/stats.hpp"

namespace mixsens {

Walker::Walker(const ChainSpec& chain, WalkOptions options) : chain_(&chain), opt_(std::move(options)) {
  const auto& g = *chain.graph;
  if (!std::is_sorted(opt_.observe_times.begin(), opt_.observe_times.end()))
    throw Error("walk: observation times must be ascending");
  auto check_mask = [&](const VertexMask* m) {
    if (m && m->size() != g.n()) throw Error("walk: vertex mask has the wrong size");
  };
  check_mask(opt_.stop_set);
  for (auto* m : opt_.tally_sets) check_mask(m);
  if (!g.has_implicit_clique() || !opt_.lump_clique) return;
  const auto& k = g.implicit_clique();
  is_interior_.assign(g.n(), 0);
  attached_pos_.assign(g.n(), 0);
  for (Vertex x = k.first; x < k.first + k.size; ++x) {
    if (g.adjacency(x).empty()) {
      interior_.push_back(x);
      is_interior_[x] = 1;
    } else {
      attached_pos_[x] = static_cast<std::uint32_t>(attached_.size());
      attached_.push_back(x);
    }
  }
  if (interior_.size() < 2) return;
  // lumping needs every mask to be constant on the interior
  std::vector<const VertexMask*> masks(opt_.tally_sets.begin(), opt_.tally_sets.end());
  if (opt_.stop_set) masks.push_back(opt_.stop_set);
  for (auto* m : masks)
    for (Vertex x : interior_)
      if ((*m)[x] != (*m)[interior_.front()]) return;
  lumped_ = true;
}

double Walker::hold(Vertex v, Rng& rng) const {
  const auto& c = *chain_;
  const bool lazy = c.timebase == Timebase::lazy;
  if (v == kLump) {
    const double na = static_cast<double>(attached_.size());
    if (!lazy) return rng.exponential(na);
    const double p = na / (2.0 * static_cast<double>(c.graph->implicit_clique().size - 1));
    return p >= 1.0 ? 1.0 : 1.0 + std::floor(std::log(rng.uniform_pos()) / std::log1p(-p));
  }
  if (!lazy) return rng.exponential(c.total_rate[v]);
  return 1.0 + std::floor(std::log(rng.uniform_pos()) / std::log(0.5));
}

Vertex Walker::jump(Vertex v, Rng& rng) const {
  const auto& g = *chain_->graph;
  if (v == kLump) return attached_[rng.below(attached_.size())];
  const double explicit_w = g.weighted_degree(v) - (g.implicit_clique().contains(v) ? g.implicit_clique().size - 1.0 : 0.0);
  double r = rng.uniform() * g.weighted_degree(v);
  if (r < explicit_w || !g.implicit_clique().contains(v)) {
    const auto adj = g.adjacency(v);
    for (const auto& inc : adj) {
      r -= g.edge(inc.edge).w;
      if (r < 0.0) return inc.to;
    }
    return adj.back().to;
  }
  const auto& k = g.implicit_clique();
  if (!lumped_) {
    auto y = static_cast<Vertex>(k.first + rng.below(k.size - 1));
    return y >= v ? y + 1 : y;
  }
  // v is attached here: interior vertices never leave the lump
  const std::uint64_t pick = rng.below(k.size - 1);
  if (pick < attached_.size() - 1) {
    const auto idx = static_cast<std::uint32_t>(pick);
    return attached_[idx >= attached_pos_[v] ? idx + 1 : idx];
  }
  return kLump;
}

Vertex Walker::concrete(Vertex v, Rng& rng) const {
  return v == kLump ? interior_[rng.below(interior_.size())] : v;
}

WalkTrace Walker::run(Vertex start, std::uint64_t seed, std::uint64_t trial) const {
  Rng rng(seed, trial);
  WalkTrace t = run(start, rng);
  t.seed = seed;
  t.trial = trial;
  return t;
}

WalkTrace Walker::run(Vertex start, Rng& rng) const {
  const auto& c = *chain_;
  if (start >= c.n()) throw Error("walk: start vertex out of range");
  if (!opt_.stop_set && !std::isfinite(opt_.horizon) && opt_.observe_times.empty())
    throw Error("walk: need a stop set, a finite horizon or observation times");
  const double horizon =
      std::isfinite(opt_.horizon) || opt_.stop_set ? opt_.horizon : opt_.observe_times.back() + 1.0;
  WalkTrace tr;
  tr.start = start;
  tr.tallies.assign(opt_.tally_sets.size(), 0.0);
  Vertex v = lumped_ && is_interior_[start] ? kLump : start;
  double now = 0.0;
  std::size_t next_obs = 0;
  if (opt_.record_events) tr.events.emplace_back(0.0, start);
  while (true) {
    if (opt_.stop_set && member(*opt_.stop_set, v)) {
      tr.hit = true;
      tr.hit_time = now;
      break;
    }
    const double h = hold(v, rng);
    const double until = std::min(now + h, horizon);
    for (std::size_t s = 0; s < opt_.tally_sets.size(); ++s)
      if (member(*opt_.tally_sets[s], v)) tr.tallies[s] += until - now;
    while (next_obs < opt_.observe_times.size() && opt_.observe_times[next_obs] < until) {
      tr.observed.push_back(concrete(v, rng));
      ++next_obs;
    }
    if (now + h >= horizon) {
      now = horizon;
      break;
    }
    now += h;
    v = jump(v, rng);
    ++tr.jumps;
    if (opt_.record_events) tr.events.emplace_back(now, concrete(v, rng));
  }
  while (next_obs < opt_.observe_times.size()) {
    tr.observed.push_back(concrete(v, rng));
    ++next_obs;
  }
  tr.end_time = now;
  tr.end_vertex = concrete(v, rng);
  if (opt_.stop_set && !tr.hit && opt_.timeout_is_error)
    throw Error("walk: stop set not reached by the horizon " + format_double(horizon));
  return tr;
}

WalkTrace simulate_walk(const ChainSpec& chain, Vertex start, const WalkOptions& options, std::uint64_t seed,
                        std::uint64_t trial) {
  return Walker(chain, options).run(start, seed, trial);
}

namespace {

std::optional<Vertex> path_midpoint(const GadgetGraph& g, int stage, int level, Vertex root) {
  // first path of the tree rooted at `root` with the given level: walk down left-first
  Vertex cur = root;
  for (int lv = 1; lv <= level; ++lv) {
    const StretchedPath* found = nullptr;
    for (const auto& p : g.paths)
      if (p.stage == stage && p.level == lv && g.path(p).front() == cur) {
        found = &p;
        break;
      }
    if (!found) return std::nullopt;
    if (lv == level) return g.path(*found)[found->length / 2];
    cur = g.path(*found).back();
  }
  return std::nullopt;
}

}  // namespace

ExitStats exit_time_stats(const GadgetGraph& g, int stage, std::size_t trials, std::uint64_t seed) {
  if (stage < 1 || stage > g.spec.u) throw Error("exit-times: stage out of range");
  const auto i = static_cast<std::size_t>(stage - 1);
  const auto chain = derive_chain(g.graph, Timebase::continuous);
  VertexMask outside(g.n(), 1);
  for (Vertex v : g.stages[i]) outside[v] = 0;
  WalkOptions opt;
  opt.stop_set = &outside;
  const Walker walker(chain, opt);
  const Vertex root = g.roots[i].front();
  const int s = static_cast<int>(g.spec.depths[i]);
  std::vector<std::pair<std::string, Vertex>> starts{{"root", root}};
  if (auto v = path_midpoint(g, stage - 1, 1, root)) starts.emplace_back("top-mid", *v);
  if (auto v = path_midpoint(g, stage - 1, s, root)) starts.emplace_back("deep-mid", *v);
  ExitStats out;
  out.stage = stage;
  const double l = g.spec.stretches[i];
  out.scale = l * l * s;
  out.worst_mean = 0.0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const auto [kind, v] = starts[k];
    auto times = run_trials<double>(trials, [&](std::size_t t) {
      return walker.run(v, seed, (static_cast<std::uint64_t>(k) << 40) + t).hit_time;
    });
    const auto rs = summarize(times);
    ExitStart es{kind, v, rs.mean, rs.stderr_mean(), quantile(times, 0.5), quantile(times, 0.99),
                 *std::max_element(times.begin(), times.end()), std::move(times)};
    out.worst_mean = std::max(out.worst_mean, es.mean);
    out.starts.push_back(std::move(es));
  }
  out.ratio = out.worst_mean / out.scale;
  return out;
}

double biased_left_probability(double delta) {
  const double r = std::sqrt(1.0 + delta);
  return r / (1.0 + r);
}

std::vector<std::uint64_t> biased_level_statistic(double delta, int k, std::size_t trials, int depth_margin,
                                                  std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error("biased-tree: delta must be >= 0");
  if (k < 1) throw Error("biased-tree: level must be >= 1");
  if (depth_margin < 20) throw Error("biased-tree: depth margin must be >= 20");
  const double wl = 1.0 + delta;
  const int bottom = k + depth_margin;
  auto g_values = run_trials<int>(trials, [&](std::size_t t) {
    Rng rng(seed, t);
    std::vector<char> bits;  // 1 = left
    bits.reserve(static_cast<std::size_t>(bottom));
    int lefts = 0, last_g = -1;
    while (static_cast<int>(bits.size()) < bottom) {
      const int d = static_cast<int>(bits.size());
      if (d == k) last_g = lefts;
      const double up = d == 0 ? 0.0 : (bits.back() ? wl : 1.0);
      const double r = rng.uniform() * (up + wl + 1.0);
      if (r < up) {
        lefts -= bits.back();
        bits.pop_back();
      } else if (r < up + wl) {
        bits.push_back(1);
        ++lefts;
      } else {
        bits.push_back(0);
      }
    }
    return last_g;
  });
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k) + 1, 0);
  for (int gv : g_values) ++counts[static_cast<std::size_t>(gv)];
  return counts;
}

CliqueTimeReport time_in_clique(const GadgetGraph& g, double horizon, std::size_t trials, std::uint64_t seed,
                                std::size_t start_stride) {
  if (!(horizon > 0.0)) throw Error("time-in-clique: horizon must be positive");
  if (start_stride == 0) start_stride = 1;
  const auto chain = derive_chain(g.graph, Timebase::continuous);
  VertexMask in_k(g.n(), 0);
  for (Vertex v = g.k_first; v < g.n(); ++v) in_k[v] = 1;
  WalkOptions opt;
  opt.horizon = horizon;
  opt.tally_sets = {&in_k};
  const Walker walker(chain, opt);
  std::vector<Vertex> starts;
  for (Vertex v = 0; v < g.gadget_size(); v += static_cast<Vertex>(start_stride)) starts.push_back(v);
  if (g.gadget_size() < g.n()) starts.push_back(static_cast<Vertex>(g.n() - 1));
  CliqueTimeReport r;
  r.horizon = horizon;
  r.min_fraction = run_trials<double>(trials, [&](std::size_t t) {
    double worst = 1.0;
    for (std::size_t j = 0; j < starts.size(); ++j) {
      const auto tr = walker.run(starts[j], seed, t * starts.size() + j);
      worst = std::min(worst, tr.tallies[0] / horizon);
    }
    return worst;
  });
  std::size_t above = 0;
  for (double f : r.min_fraction) above += f > 2.0 / 3.0;
  r.fraction_above = trials ? static_cast<double>(above) / static_cast<double>(trials) : 0.0;
  return r;
}

std::vector<TraversalTrial> root_particle_traversal(const GadgetGraph& g, std::size_t trials, std::uint64_t seed,
                                                    double horizon) {
  const auto chain = derive_chain(g.graph, Timebase::continuous);
  const int u = g.spec.u;
  VertexMask in_k(g.n(), 0);
  for (Vertex v = g.k_first; v < g.n(); ++v) in_k[v] = 1;
  std::vector<VertexMask> bad(static_cast<std::size_t>(u), VertexMask(g.n(), 0));
  for (int i = 0; i < u; ++i)
    for (Vertex v : g.bad_leaves[static_cast<std::size_t>(i)]) bad[static_cast<std::size_t>(i)][v] = 1;
  WalkOptions opt;
  opt.stop_set = &in_k;
  opt.horizon = horizon;
  for (const auto& m : bad) opt.tally_sets.push_back(&m);
  const Walker walker(chain, opt);
  return run_trials<TraversalTrial>(trials, [&](std::size_t t) {
    const auto tr = walker.run(g.root, seed, t);
    TraversalTrial out;
    out.t_k = tr.hit ? tr.hit_time : std::numeric_limits<double>::infinity();
    out.reached.assign(static_cast<std::size_t>(u), 0);
    for (int i = 0; i < u; ++i) {
      const auto& m = bad[static_cast<std::size_t>(i)];
      out.reached[static_cast<std::size_t>(i)] = tr.tallies[static_cast<std::size_t>(i)] > 0.0 || (tr.hit && m[tr.end_vertex]);
    }
    return out;
  });
}

std::vector<std::uint64_t> root_in_gadget_counts(const GadgetGraph& g, std::span<const double> times,
                                                 std::size_t trials, std::uint64_t seed) {
  const auto chain = derive_chain(g.graph, Timebase::continuous);
  WalkOptions opt;
  opt.observe_times.assign(times.begin(), times.end());
  if (!std::is_sorted(opt.observe_times.begin(), opt.observe_times.end()))
    throw Error("root-in-gadget: times must be ascending");
  const Walker walker(chain, opt);
  const auto hits = run_trials<std::vector<char>>(trials, [&](std::size_t t) {
    const auto tr = walker.run(g.root, seed, t);
    std::vector<char> in(tr.observed.size());
    for (std::size_t j = 0; j < in.size(); ++j) in[j] = g.in_gadget(tr.observed[j]);
    return in;
  });
  std::vector<std::uint64_t> counts(times.size(), 0);
  for (const auto& h : hits)
    for (std::size_t j = 0; j < h.size(); ++j) counts[j] += h[j] != 0;
  return counts;
}

}  // namespace mixsens
