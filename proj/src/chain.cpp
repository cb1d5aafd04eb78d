#include "mixsens/chain.hpp"

#include <numeric>

#include "mixsens/alias.hpp"

namespace mixsens {

std::string_view to_string(Timebase tb) { return tb == Timebase::lazy ? "lazy" : "ct"; }

Timebase timebase_from_string(std::string_view name) {
  if (name == "lazy" || name == "discrete") return Timebase::lazy;
  if (name == "ct" || name == "continuous") return Timebase::continuous;
  throw Error("unknown timebase '" + std::string(name) + "' (expected lazy|ct)");
}

ChainSpec derive_chain(std::shared_ptr<const WeightedGraph> g, Timebase tb) {
  if (!g || g->n() == 0) throw Error("derive_chain: empty graph");
  if (!g->is_connected()) throw Error("derive_chain: graph is disconnected, mixing is undefined");
  ChainSpec c;
  c.timebase = tb;
  const std::size_t n = g->n();
  c.total_rate.resize(n);
  for (Vertex v = 0; v < n; ++v) c.total_rate[v] = g->weighted_degree(v);
  if (tb == Timebase::lazy) {
    const double total = std::accumulate(c.total_rate.begin(), c.total_rate.end(), 0.0);
    c.pi.resize(n);
    for (std::size_t v = 0; v < n; ++v) c.pi[v] = c.total_rate[v] / total;
  } else {
    c.pi.assign(n, 1.0 / static_cast<double>(n));
  }
  c.graph = std::move(g);
  return c;
}

ChainSpec derive_chain(const WeightedGraph& g, Timebase tb) {
  return derive_chain(std::make_shared<const WeightedGraph>(g), tb);
}

double ChainSpec::entry(Vertex x, Vertex y) const {
  if (x == y) return timebase == Timebase::lazy ? 0.5 : -total_rate[x];
  const double w = graph->weight_between(x, y);
  return timebase == Timebase::lazy ? w / (2.0 * total_rate[x]) : w;
}

Eigen::MatrixXd dense_kernel(const ChainSpec& c) {
  const auto n = static_cast<Eigen::Index>(c.n());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const auto& g = *c.graph;
  const bool lazy = c.timebase == Timebase::lazy;
  for (const auto& e : g.edges()) {
    m(e.u, e.v) += lazy ? e.w / (2.0 * c.total_rate[e.u]) : e.w;
    m(e.v, e.u) += lazy ? e.w / (2.0 * c.total_rate[e.v]) : e.w;
  }
  if (g.has_implicit_clique()) {
    const auto& k = g.implicit_clique();
    for (Vertex x = k.first; x < k.first + k.size; ++x)
      for (Vertex y = k.first; y < k.first + k.size; ++y)
        if (x != y) m(x, y) += lazy ? 1.0 / (2.0 * c.total_rate[x]) : 1.0;
  }
  for (Eigen::Index x = 0; x < n; ++x) m(x, x) = lazy ? 0.5 : -c.total_rate[static_cast<std::size_t>(x)];
  return m;
}

Eigen::MatrixXd dense_operator(const ChainSpec& c) {
  Eigen::MatrixXd k = dense_kernel(c);
  if (c.timebase == Timebase::lazy) return Eigen::MatrixXd::Identity(k.rows(), k.cols()) - k;
  return -k;
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw Error("alias table over an empty support");
  total_ = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error("alias table weights must be non-negative");
    total_ += w;
  }
  if (!(total_ > 0.0)) throw Error("alias table weights sum to zero");
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total_;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (auto i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

}  // namespace mixsens
