#include "mixsens/electrical.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

namespace mixsens {

std::vector<double> solve_potential(const WeightedGraph& g0, std::span<const Vertex> boundary,
                                    std::span<const double> boundary_values, std::span<const double> current,
                                    SolveInfo* info) {
  const WeightedGraph g = g0.materialized();
  const std::size_t n = g.n();
  if (boundary.size() != boundary_values.size()) throw Error("solve_potential: boundary size mismatch");
  if (!current.empty() && current.size() != n) throw Error("solve_potential: one current per vertex required");
  std::vector<long> index(n, -1);
  std::vector<double> v(n, 0.0);
  std::vector<char> fixed(n, 0);
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    fixed[boundary[j]] = 1;
    v[boundary[j]] = boundary_values[j];
  }
  long m = 0;
  for (std::size_t x = 0; x < n; ++x)
    if (!fixed[x]) index[x] = m++;
  if (boundary.empty()) throw Error("solve_potential: empty boundary (singular Laplacian)");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (std::size_t x = 0; x < n; ++x) {
    if (fixed[x]) continue;
    if (!current.empty()) rhs(index[x]) += current[x];
  }
  std::string method;
  Eigen::VectorXd sol;
  if (static_cast<std::size_t>(m) < kDenseSolveLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (const auto& e : g.edges()) {
      const long iu = index[e.u], iv = index[e.v];
      if (iu >= 0) a(iu, iu) += e.w;
      if (iv >= 0) a(iv, iv) += e.w;
      if (iu >= 0 && iv >= 0) {
        a(iu, iv) -= e.w;
        a(iv, iu) -= e.w;
      }
      if (iu >= 0 && iv < 0) rhs(iu) += e.w * v[e.v];
      if (iv >= 0 && iu < 0) rhs(iv) += e.w * v[e.u];
    }
    sol = a.partialPivLu().solve(rhs);
    method = "dense-lu";
  } else {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * g.num_explicit_edges());
    for (const auto& e : g.edges()) {
      const long iu = index[e.u], iv = index[e.v];
      if (iu >= 0) trip.emplace_back(iu, iu, e.w);
      if (iv >= 0) trip.emplace_back(iv, iv, e.w);
      if (iu >= 0 && iv >= 0) {
        trip.emplace_back(iu, iv, -e.w);
        trip.emplace_back(iv, iu, -e.w);
      }
      if (iu >= 0 && iv < 0) rhs(iu) += e.w * v[e.v];
      if (iv >= 0 && iu < 0) rhs(iv) += e.w * v[e.u];
    }
    Eigen::SparseMatrix<double> a(m, m);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(kSolveTolerance);
    cg.setMaxIterations(20 * m + 1000);
    cg.compute(a);
    sol = cg.solve(rhs);
    method = "cg-jacobi";
  }
  for (std::size_t x = 0; x < n; ++x)
    if (!fixed[x]) v[x] = sol(index[x]);
  if (info) {
    double res = 0.0;
    std::vector<double> net(n, 0.0);
    for (const auto& e : g.edges()) {
      net[e.u] += e.w * (v[e.u] - v[e.v]);
      net[e.v] += e.w * (v[e.v] - v[e.u]);
    }
    for (std::size_t x = 0; x < n; ++x)
      if (!fixed[x]) res = std::max(res, std::abs(net[x] - (current.empty() ? 0.0 : current[x])));
    info->method = method;
    info->residual = res;
  }
  return v;
}

std::vector<std::vector<double>> harmonic_measures(const WeightedGraph& g0, std::span<const Vertex> boundary,
                                                   SolveInfo* info) {
  const WeightedGraph g = g0.materialized();
  const std::size_t n = g.n();
  if (boundary.empty()) throw Error("harmonic_measures: empty boundary");
  std::vector<long> index(n, -1), bidx(n, -1);
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    if (boundary[j] >= n) throw Error("harmonic_measures: boundary vertex out of range");
    bidx[boundary[j]] = static_cast<long>(j);
  }
  long m = 0;
  for (std::size_t x = 0; x < n; ++x)
    if (bidx[x] < 0) index[x] = m++;
  const auto k = static_cast<Eigen::Index>(boundary.size());
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, k);
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : g.edges()) {
    const long iu = index[e.u], iv = index[e.v];
    if (iu >= 0) trip.emplace_back(iu, iu, e.w);
    if (iv >= 0) trip.emplace_back(iv, iv, e.w);
    if (iu >= 0 && iv >= 0) {
      trip.emplace_back(iu, iv, -e.w);
      trip.emplace_back(iv, iu, -e.w);
    }
    if (iu >= 0 && iv < 0) rhs(iu, bidx[e.v]) += e.w;
    if (iv >= 0 && iu < 0) rhs(iv, bidx[e.u]) += e.w;
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::MatrixXd sol(m, k);
  std::string method;
  if (static_cast<std::size_t>(m) < kDenseSolveLimit) {
    sol = Eigen::MatrixXd(a).partialPivLu().solve(rhs);
    method = "dense-lu";
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(kSolveTolerance);
    cg.setMaxIterations(20 * m + 1000);
    cg.compute(a);
    for (Eigen::Index j = 0; j < k; ++j) sol.col(j) = cg.solve(rhs.col(j));
    method = "cg-jacobi";
  }
  std::vector<std::vector<double>> out(boundary.size(), std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    out[j][boundary[j]] = 1.0;
    for (std::size_t x = 0; x < n; ++x)
      if (index[x] >= 0) out[j][x] = sol(index[x], static_cast<Eigen::Index>(j));
  }
  if (info) {
    info->method = method;
    info->residual = m > 0 ? (a * sol - rhs).cwiseAbs().maxCoeff() : 0.0;
  }
  return out;
}

SolveInfo effective_resistance(const WeightedGraph& g, Vertex a, Vertex b) {
  if (a == b) throw Error("effective_resistance: endpoints must differ");
  if (a >= g.n() || b >= g.n()) throw Error("effective_resistance: vertex out of range");
  if (!g.is_connected()) throw Error("effective_resistance: graph is disconnected");
  std::vector<double> cur(g.n(), 0.0);
  cur[a] = 1.0;
  const Vertex bnd[1] = {b};
  const double val[1] = {0.0};
  SolveInfo info;
  const auto v = solve_potential(g, bnd, val, cur, &info);
  info.value = v[a];
  return info;
}

namespace {

// component labels of g without vertex v (v gets -1)
std::vector<int> components_without(const WeightedGraph& g, Vertex v) {
  std::vector<int> comp(g.n(), -1);
  int c = 0;
  for (Vertex s = 0; s < g.n(); ++s) {
    if (s == v || comp[s] >= 0) continue;
    std::queue<Vertex> q;
    q.push(s);
    comp[s] = c;
    while (!q.empty()) {
      const Vertex x = q.front();
      q.pop();
      for (const auto& inc : g.adjacency(x))
        if (inc.to != v && comp[inc.to] < 0) {
          comp[inc.to] = c;
          q.push(inc.to);
        }
    }
    ++c;
  }
  return comp;
}

}  // namespace

SplitResult hitting_split(const WeightedGraph& g0, Vertex v, std::span<const Vertex> targets) {
  const WeightedGraph g = g0.materialized();
  if (targets.empty()) throw Error("hitting_split: no targets");
  if (!g.is_connected()) throw Error("hitting_split: graph is disconnected");
  const auto comp = components_without(g, v);
  std::vector<int> seen;
  for (Vertex w : targets) {
    if (w == v || w >= g.n()) throw Error("hitting_split: invalid target");
    if (std::find(seen.begin(), seen.end(), comp[w]) != seen.end())
      throw Error("hitting_split: targets are not separated by the cut vertex");
    seen.push_back(comp[w]);
  }
  SplitResult r;
  for (Vertex w : targets) {
    std::vector<Vertex> local(g.n(), ~Vertex{0});
    Vertex cnt = 0;
    local[v] = cnt++;
    for (Vertex x = 0; x < g.n(); ++x)
      if (comp[x] == comp[w]) local[x] = cnt++;
    GraphBuilder b(cnt);
    for (const auto& e : g.edges())
      if (local[e.u] != ~Vertex{0} && local[e.v] != ~Vertex{0}) b.add_edge(local[e.u], local[e.v], e.w);
    const auto sub = std::move(b).build();
    r.conductances.push_back(1.0 / effective_resistance(sub, 0, local[w]).value);
  }
  double total = 0.0;
  for (double c : r.conductances) total += c;
  for (double c : r.conductances) r.conductance_law.push_back(c / total);
  const auto h = harmonic_measures(g, targets);
  for (std::size_t i = 0; i < targets.size(); ++i) r.absorption.push_back(h[i][v]);
  for (std::size_t i = 0; i < targets.size(); ++i)
    r.max_difference = std::max(r.max_difference, std::abs(r.absorption[i] - r.conductance_law[i]));
  return r;
}

WeightedGraph reduce_series_parallel(const WeightedGraph& g0, std::span<const Vertex> keep) {
  const WeightedGraph g = g0.materialized();
  const std::size_t n = g.n();
  std::vector<std::map<Vertex, double>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.u][e.v] += e.w;
    adj[e.v][e.u] += e.w;
  }
  std::vector<char> kept(n, 0), alive(n, 1);
  for (Vertex k : keep) {
    if (k >= n) throw Error("reduce_series_parallel: keep vertex out of range");
    kept[k] = 1;
  }
  std::vector<Vertex> work;
  for (Vertex x = 0; x < n; ++x)
    if (!kept[x]) work.push_back(x);
  while (!work.empty()) {
    const Vertex x = work.back();
    work.pop_back();
    if (!alive[x] || kept[x]) continue;
    const std::size_t d = adj[x].size();
    if (d > 2) continue;
    std::vector<std::pair<Vertex, double>> nb(adj[x].begin(), adj[x].end());
    for (const auto& [y, c] : nb) adj[y].erase(x);
    adj[x].clear();
    alive[x] = 0;
    if (d == 2) {
      const auto [y, cy] = nb[0];
      const auto [z, cz] = nb[1];
      const double c = cy * cz / (cy + cz);
      adj[y][z] += c;
      adj[z][y] += c;
    }
    for (const auto& [y, c] : nb)
      if (!kept[y]) work.push_back(y);
  }
  for (Vertex x = 0; x < n; ++x)
    if (alive[x] && !kept[x])
      throw Error("reduce_series_parallel: vertex " + std::to_string(x) + " of degree " +
                  std::to_string(adj[x].size()) + " blocks the reduction");
  std::vector<Vertex> local(n, ~Vertex{0});
  for (std::size_t j = 0; j < keep.size(); ++j) local[keep[j]] = static_cast<Vertex>(j);
  GraphBuilder b(keep.size());
  for (Vertex x : keep)
    for (const auto& [y, c] : adj[x])
      if (x < y) b.add_edge(local[x], local[y], c);
  return std::move(b).build();
}

double stretched_tree_root_hit(std::span<const double> f, int h, int depth_cutoff) {
  const int d = depth_cutoff;
  if (h < 0 || d <= h) throw Error("tree-hit: need 0 <= h < D");
  if (f.size() < static_cast<std::size_t>(d)) throw Error("tree-hit: f must give f(1..D)");
  for (int i = 0; i < d; ++i) {
    if (!(f[static_cast<std::size_t>(i)] > 0.0)) throw Error("tree-hit: f must be positive");
    if (i > 0 && f[static_cast<std::size_t>(i)] > f[static_cast<std::size_t>(i - 1)])
      throw Error("tree-hit: f must be non-increasing");
  }
  if (h == 0) return 1.0;
  // level path 0..D, level i-1 to i carries 2^i parallel paths of resistance f(i)
  GraphBuilder b(static_cast<std::size_t>(d) + 1);
  for (int i = 1; i <= d; ++i)
    b.add_edge(static_cast<Vertex>(i - 1), static_cast<Vertex>(i),
               std::ldexp(1.0, i) / f[static_cast<std::size_t>(i - 1)]);
  const auto levels = std::move(b).build();
  const Vertex keep[3] = {0, static_cast<Vertex>(h), static_cast<Vertex>(d)};
  const auto red = reduce_series_parallel(levels, keep);
  const double r_top = 1.0 / red.weight_between(0, 1);
  const double r_bottom = 1.0 / red.weight_between(1, 2);
  return r_bottom / (r_top + r_bottom);
}

}  // namespace mixsens
