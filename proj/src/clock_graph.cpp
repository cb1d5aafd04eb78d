#include "mixsens/clock_graph.hpp"

#include <algorithm>
#include <cmath>

#include "mixsens/electrical.hpp"
#include "mixsens/interchange.hpp"
#include "mixsens/parallel.hpp"

namespace mixsens {

ClockAuxGraph build_clock_aux(int m, std::optional<WeightedGraph> target, std::size_t max_vertices) {
  if (m < 1 || m > 3) throw Error("clock graph: m must lie in [1, 3]");
  const int d = 4 * m, s = 5 * m;
  const std::size_t trees = std::size_t{1} << m;
  const std::size_t tree_size = (std::size_t{2} << d) - 1;
  const std::size_t leaves_per_tree = std::size_t{1} << d;
  std::size_t total = trees * tree_size;
  std::vector<std::size_t> sizes, offsets;
  for (int l = 1; l <= s; ++l) {
    offsets.push_back(total);
    sizes.push_back((std::size_t{1} << (2 * l)) << (s - l));
    total += sizes.back();
  }
  if (total > max_vertices)
    throw Error("clock graph: " + std::to_string(total) + " vertices exceed the cap of " +
                std::to_string(max_vertices));

  ClockAuxGraph h;
  h.m = m;
  h.layer_sizes = sizes;
  if (target) h.target = std::move(*target);
  else h.target = build_basic(BasicShape::path, trees);
  if (h.target.num_explicit_edges() > trees)
    throw Error("clock graph: the target graph has more edges than |B| = " + std::to_string(trees));
  if (h.target.has_implicit_clique()) h.target = h.target.materialized();

  GraphBuilder b(total);
  h.layer.assign(total, 0);
  h.depth.assign(total, -1);
  auto tree_vertex = [&](std::size_t t, std::size_t q) { return static_cast<Vertex>(t * tree_size + q); };
  for (std::size_t t = 0; t < trees; ++t) {
    h.B.push_back(tree_vertex(t, 0));
    for (std::size_t q = 0; q < tree_size; ++q) {
      int dep = 0;
      for (std::size_t y = q + 1; y > 1; y >>= 1) ++dep;
      h.depth[tree_vertex(t, q)] = static_cast<std::int16_t>(dep);
      if (2 * q + 2 < tree_size) {
        b.add_edge(tree_vertex(t, q), tree_vertex(t, 2 * q + 1));
        b.add_edge(tree_vertex(t, q), tree_vertex(t, 2 * q + 2));
      }
    }
  }
  // leaf label j (0-based) -> vertex
  auto leaf = [&](std::size_t j) {
    const std::size_t t = j / leaves_per_tree, q = j % leaves_per_tree;
    return tree_vertex(t, leaves_per_tree - 1 + q);
  };
  // u^k_I in layer l (1-based), I in [4^l], k in [2^{s-l}]
  auto layer_vertex = [&](int l, std::size_t idx, std::size_t k) {
    return static_cast<Vertex>(offsets[static_cast<std::size_t>(l - 1)] + (idx << (s - l)) + k);
  };
  for (int l = 1; l <= s; ++l)
    for (std::size_t v = 0; v < sizes[static_cast<std::size_t>(l - 1)]; ++v)
      h.layer[offsets[static_cast<std::size_t>(l - 1)] + v] = static_cast<std::int16_t>(l);
  const std::size_t half = std::size_t{1} << (s - 1);
  for (std::size_t j = 0; j < half; ++j)
    for (std::size_t i = 0; i < 4; ++i) {
      b.add_edge(leaf(j), layer_vertex(1, i, j));
      b.add_edge(leaf(j + half), layer_vertex(1, i, j));
    }
  for (int l = 1; l < s; ++l) {
    const std::size_t count = std::size_t{1} << (2 * l);
    const std::size_t kk = std::size_t{1} << (s - l - 1);
    for (std::size_t idx = 0; idx < count; ++idx)
      for (std::size_t k = 0; k < kk; ++k)
        for (std::size_t i = 0; i < 4; ++i) {
          const Vertex up = layer_vertex(l + 1, idx * 4 + i, k);
          b.add_edge(layer_vertex(l, idx, k), up);
          b.add_edge(layer_vertex(l, idx, k + kk), up);
        }
  }
  h.graph = std::move(b).build();
  for (std::size_t v = 0; v < sizes.back(); ++v) h.W.push_back(static_cast<Vertex>(offsets.back() + v));
  h.a_index.assign(total, -1);
  for (std::size_t j = 0; j < h.target.num_explicit_edges(); ++j) {
    h.A.push_back(h.B[j]);
    h.tau.push_back(static_cast<EdgeId>(j));
    h.a_index[h.B[j]] = static_cast<std::int32_t>(j);
  }
  return h;
}

namespace {

Vertex uniform_neighbor(const WeightedGraph& g, Vertex x, Rng& rng) {
  const auto adj = g.adjacency(x);
  return adj[rng.below(adj.size())].to;
}

}  // namespace

bool product_chain_step(const ClockAuxGraph& h, ProductState& st, Rng& rng, double swap_boost) {
  if (st.x >= h.n()) throw Error("product chain: vertex out of range");
  if (st.sigma.size() != h.target.n()) throw Error("product chain: sigma has the wrong size");
  const std::int32_t ai = h.a_index[st.x];
  if (ai >= 0 && rng.uniform() * (1.0 + swap_boost) < swap_boost) {
    const auto& e = h.target.edge(h.tau[static_cast<std::size_t>(ai)]);
    std::swap(st.sigma[e.u], st.sigma[e.v]);
    return true;
  }
  st.x = uniform_neighbor(h.graph, st.x, rng);
  return false;
}

UniformHitting uniform_hitting_check(const ClockAuxGraph& h) {
  SolveInfo info;
  const auto meas = harmonic_measures(h.graph, h.B, &info);
  UniformHitting r;
  r.method = info.method;
  r.residual = info.residual;
  const double u = 1.0 / static_cast<double>(h.B.size());
  for (const auto& col : meas)
    for (Vertex w : h.W) r.max_error = std::max(r.max_error, std::abs(col[w] - u));
  return r;
}

std::vector<double> exact_hitting_times_to_B(const ClockAuxGraph& h, std::span<const Vertex> starts) {
  std::vector<double> cur(h.n());
  for (Vertex x = 0; x < h.n(); ++x) cur[x] = h.graph.weighted_degree(x);
  auto solve_without = [&](std::optional<Vertex> skip) {
    std::vector<Vertex> bnd;
    for (Vertex b : h.B)
      if (!skip || b != *skip) bnd.push_back(b);
    const std::vector<double> zeros(bnd.size(), 0.0);
    return solve_potential(h.graph, bnd, zeros, cur);
  };
  std::vector<double> out(starts.size());
  std::optional<std::vector<double>> plain;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const Vertex x = starts[i];
    if (h.a_index[x] >= 0 || std::find(h.B.begin(), h.B.end(), x) != h.B.end()) {
      out[i] = solve_without(x)[x];
    } else {
      if (!plain) plain = solve_without(std::nullopt);
      out[i] = (*plain)[x];
    }
  }
  return out;
}

std::vector<RunningStats> sampled_hitting_times_to_B(const ClockAuxGraph& h, std::span<const Vertex> starts,
                                                     std::size_t trials, std::uint64_t seed) {
  std::vector<char> in_b(h.n(), 0);
  for (Vertex b : h.B) in_b[b] = 1;
  std::vector<RunningStats> out(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const Vertex start = starts[i];
    const auto times = run_trials<double>(trials, [&](std::size_t t) {
      Rng rng(seed, (static_cast<std::uint64_t>(i) << 32) + t);
      Vertex x = start;
      std::uint64_t steps = 0;
      do {
        x = uniform_neighbor(h.graph, x, rng);
        ++steps;
      } while (!(in_b[x] && x != start));
      return static_cast<double>(steps);
    });
    out[i] = summarize(times);
  }
  return out;
}

double return_probability(const ClockAuxGraph& h, Vertex a) {
  if (h.a_index[a] < 0 && std::find(h.B.begin(), h.B.end(), a) == h.B.end())
    throw Error("return probability: a must be a root in B");
  std::vector<Vertex> bnd;
  std::vector<double> to_w, to_a;
  for (Vertex w : h.W) {
    bnd.push_back(w);
    to_w.push_back(1.0);
    to_a.push_back(0.0);
  }
  for (Vertex b : h.B)
    if (b != a) {
      bnd.push_back(b);
      to_w.push_back(0.0);
      to_a.push_back(0.0);
    }
  const auto hw = solve_potential(h.graph, bnd, to_w, {});
  bnd.push_back(a);
  to_a.push_back(1.0);
  const auto ga = solve_potential(h.graph, bnd, to_a, {});
  double num = 0.0, den = 0.0;
  for (const auto& inc : h.graph.adjacency(a)) {
    num += ga[inc.to];
    den += hw[inc.to];
  }
  return hw[a] * num / den;
}

double p_even_formula(double q, double p_return) { return 1.0 - q / (1.0 + q - (1.0 - q) * p_return); }

double PEvenEstimate::stderr_p() const {
  if (accepted == 0) return 0.0;
  const double p = p_hat();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(accepted));
}

PEvenEstimate p_even_monte_carlo(const ClockAuxGraph& h, Vertex a, double swap_boost, std::size_t trials,
                                 std::uint64_t seed) {
  std::vector<char> kind(h.n(), 0);  // 1 = W, 2 = B \ {a}
  for (Vertex w : h.W) kind[w] = 1;
  for (Vertex b : h.B)
    if (b != a) kind[b] = 2;
  const double q = swap_boost / (1.0 + swap_boost);
  // 0 = rejected, 1 = odd, 2 = even
  const auto res = run_trials<int>(trials, [&](std::size_t t) {
    Rng rng(seed, t);
    Vertex x = a;
    std::uint64_t swaps = 0;
    while (true) {
      if (kind[x] == 1) return swaps % 2 == 0 ? 2 : 1;
      if (kind[x] == 2) return 0;
      if (x == a && rng.uniform() < q) {
        ++swaps;
        continue;
      }
      x = uniform_neighbor(h.graph, x, rng);
    }
  });
  PEvenEstimate e;
  for (int r : res) {
    if (r == 0) ++e.rejected;
    else {
      ++e.accepted;
      e.even += r == 2;
    }
  }
  return e;
}

std::vector<ReturnRecord> product_chain_smoke(const ClockAuxGraph& h, Vertex start, std::uint64_t steps,
                                              std::uint64_t seed, double swap_boost) {
  std::vector<char> in_b(h.n(), 0), in_w(h.n(), 0);
  for (Vertex b : h.B) in_b[b] = 1;
  for (Vertex w : h.W) in_w[w] = 1;
  Rng rng(seed, 0);
  ProductState st{start, InterchangeState::identity(h.target.n()).sigma};
  std::vector<ReturnRecord> out;
  bool seen_w = false;
  std::uint64_t swaps = 0;
  for (std::uint64_t s = 1; s <= steps; ++s) {
    swaps += product_chain_step(h, st, rng, swap_boost);
    if (in_w[st.x]) seen_w = true;
    if (in_b[st.x] && seen_w) {
      out.push_back({s, st.x, rank_permutation(st.sigma), swaps});
      seen_w = false;
    }
  }
  return out;
}

}  // namespace mixsens
