#include "mixsens/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mixsens/electrical.hpp"
#include "mixsens/spectral.hpp"

namespace mixsens {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(double lo, double x, double hi) {
  const double tol = kAssertTolerance * std::max(1.0, std::abs(x));
  return x >= lo - tol && x <= hi + tol;
}

void record(CheckResult& r, bool ok, double margin, const std::string& what) {
  r.worst = std::max(r.worst, margin);
  if (!ok && r.pass) {
    r.pass = false;
    r.detail = what;
  }
}

std::string repro(const std::string& check, std::uint64_t seed, std::size_t instance) {
  return check + " instance " + std::to_string(instance) + " (reproduce: mixsens verify --seed " +
         std::to_string(seed) + ")";
}

std::size_t random_size(Rng& rng) { return 3 + rng.below(10); }

// Graph i of the spectral suite, shared by the Cheeger, exit-tail and L2 checks.
WeightedGraph suite_graph(std::uint64_t seed, std::size_t i) {
  Rng rng(seed, i);
  return random_weighted_graph(random_size(rng), rng);
}

}  // namespace

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

ResultTable VerificationReport::table() const {
  ResultTable t("verification");
  for (const auto& c : checks)
    t.add_row({c.name, static_cast<std::int64_t>(c.instances), static_cast<std::int64_t>(c.pass), c.worst});
  return t;
}

WeightedGraph random_weighted_graph(std::size_t n, Rng& rng, double edge_prob, double wmin, double wmax) {
  if (n < 2) throw Error("random graph: need at least 2 vertices");
  GraphBuilder b(n);
  std::vector<char> has(n * n, 0);
  auto weight = [&] { return wmin + (wmax - wmin) * rng.uniform(); };
  for (Vertex x = 1; x < n; ++x) {
    const auto y = static_cast<Vertex>(rng.below(x));
    b.add_edge(x, y, weight());
    has[x * n + y] = has[y * n + x] = 1;
  }
  for (Vertex x = 0; x < n; ++x)
    for (Vertex y = x + 1; y < n; ++y)
      if (!has[x * n + y] && rng.bernoulli(edge_prob)) b.add_edge(x, y, weight());
  return std::move(b).build();
}

CutVertexInstance random_cut_vertex_graph(std::size_t max_vertices, Rng& rng) {
  if (max_vertices < 5) throw Error("cut-vertex graph: need at least 5 vertices");
  const std::size_t k = 2 + rng.below(3);
  const std::size_t per = std::max<std::size_t>(2, (max_vertices - 1) / k);
  std::vector<WeightedGraph> parts;
  std::size_t n = 1;
  for (std::size_t c = 0; c < k && n + 2 <= max_vertices; ++c) {
    const std::size_t s = std::min<std::size_t>(2 + rng.below(per - 1), max_vertices - n);
    parts.push_back(random_weighted_graph(s, rng, 4.0 / static_cast<double>(s)));
    n += s;
  }
  CutVertexInstance inst;
  GraphBuilder b(n);
  Vertex off = 1;
  for (const auto& p : parts) {
    for (const auto& e : p.edges()) b.add_edge(off + e.u, off + e.v, e.w);
    const std::size_t attach = 1 + rng.below(std::min<std::size_t>(3, p.n()));
    for (std::size_t a = 0; a < attach; ++a) b.add_edge(0, off + static_cast<Vertex>(rng.below(p.n())), 0.2 + 4.8 * rng.uniform());
    inst.targets.push_back(off + static_cast<Vertex>(rng.below(p.n())));
    off += static_cast<Vertex>(p.n());
  }
  inst.graph = std::move(b).build();
  return inst;
}

std::vector<Vertex> random_small_subset(const ChainSpec& chain, Rng& rng) {
  const std::size_t n = chain.n();
  for (;;) {
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    const std::size_t size = 1 + rng.below(std::max<std::size_t>(1, n / 2));
    std::vector<Vertex> a(order.begin(), order.begin() + static_cast<long>(size));
    double mass = 0.0;
    for (Vertex x : a) mass += chain.pi[x];
    if (mass <= 0.5) {
      std::sort(a.begin(), a.end());
      return a;
    }
  }
}

WeightedGraph bridged_path(std::size_t half_length) {
  GraphBuilder b(2 * half_length + 1);
  for (Vertex i = 0; i < 2 * half_length; ++i) b.add_edge(i, i + 1, 1.0, EdgeTag{EdgeKind::left});
  for (Vertex j = 0; j < half_length; ++j) b.add_edge(2 * j, 2 * j + 2, 1.0, EdgeTag{EdgeKind::bridge});
  return std::move(b).build();
}

std::vector<double> random_stretch_function(int depth, Rng& rng) {
  std::vector<double> f(static_cast<std::size_t>(depth));
  double cur = static_cast<double>(1 + rng.below(16));
  for (auto& x : f) {
    x = cur;
    if (cur > 1 && rng.bernoulli(0.3)) cur = static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(cur)));
  }
  return f;
}

CheckResult check_bridged_path(const VerifyConfig& cfg) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "bridged_path_resistance";
  for (int n : cfg.path_ns) {
    const auto g = bridged_path(static_cast<std::size_t>(n));
    const double err = std::abs(effective_resistance(g, 0, static_cast<Vertex>(2 * n)).value - 2.0 * n / 3.0);
    record(r, err <= 1e-9, err, "N=" + std::to_string(n) + ": error " + format_double(err));
    ++r.instances;
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_conductance_split(const VerifyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "conductance_split";
  for (std::size_t i = 0; i < cfg.split_graphs; ++i) {
    Rng rng(seed ^ 0x5b1d, i);
    const auto inst = random_cut_vertex_graph(200, rng);
    auto split = hitting_split(inst.graph, inst.v, inst.targets);
    if (cfg.corrupt_conductance) {
      std::vector<double> w;
      for (const auto& e : inst.graph.edges()) w.push_back(e.w);
      w[0] *= 1.5;
      split.conductance_law = hitting_split(inst.graph.with_weights(w), inst.v, inst.targets).conductance_law;
      split.max_difference = 0.0;
      for (std::size_t j = 0; j < split.absorption.size(); ++j)
        split.max_difference =
            std::max(split.max_difference, std::abs(split.absorption[j] - split.conductance_law[j]));
    }
    record(r, split.max_difference <= 1e-10, split.max_difference,
           repro("conductance_split", seed, i) + ": difference " + format_double(split.max_difference));
    ++r.instances;
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_tree_lemma(const VerifyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "stretched_tree_lemma";
  const int d = cfg.tree_depth;
  for (std::size_t i = 0; i <= cfg.tree_functions; ++i) {
    Rng rng(seed ^ 0x7ee, i);
    // instance 0 is f = 1, where the bound is attained up to 2^{-(D-h)}
    const auto f = i == 0 ? std::vector<double>(static_cast<std::size_t>(d), 1.0) : random_stretch_function(d, rng);
    for (int h = 1; h <= std::min(10, d - 1); ++h) {
      const double p = stretched_tree_root_hit(f, h, d);
      const double bound = std::ldexp(1.0, -h) + std::ldexp(1.0, -(d - h));
      record(r, p <= bound + 1e-12, std::max(0.0, p - bound),
             repro("tree_lemma", seed, i) + ": h=" + std::to_string(h) + " exceeds the bound");
      if (i == 0) {
        const double gap = std::abs(p - std::ldexp(1.0, -h));
        record(r, gap <= 1e-6, 0.0, "f=1, h=" + std::to_string(h) + ": not tight, gap " + format_double(gap));
      }
      ++r.instances;
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_cheeger(const VerifyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "cheeger";
  for (std::size_t i = 0; i < cfg.cheeger_graphs; ++i) {
    const auto g = std::make_shared<const WeightedGraph>(suite_graph(seed, i));
    for (Timebase tb : {Timebase::lazy, Timebase::continuous}) {
      const auto c = derive_chain(g, tb);
      const double lam = spectrum(c).gap;
      const double phi = cheeger(c).phi;
      double denom = 2.0;
      if (tb == Timebase::continuous) denom *= *std::max_element(c.total_rate.begin(), c.total_rate.end());
      const double lo = phi * phi / denom, hi = 2.0 * phi;
      record(r, within(lo, lam, hi), std::max({0.0, lo - lam, lam - hi}),
             repro("cheeger", seed, i) + " (" + std::string(to_string(tb)) + "): " + format_double(lo) +
                 " <= " + format_double(lam) + " <= " + format_double(hi) + " fails");
      ++r.instances;
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_restricted_cheeger(const VerifyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "restricted_cheeger";
  for (std::size_t i = 0; i < cfg.cheeger_graphs; ++i) {
    const auto g = std::make_shared<const WeightedGraph>(suite_graph(seed, i));
    Rng rng(seed ^ 0xa5, i);
    for (Timebase tb : {Timebase::lazy, Timebase::continuous}) {
      const auto c = derive_chain(g, tb);
      for (int s = 0; s < 3; ++s) {
        const auto rs = restricted(c, random_small_subset(c, rng));
        const double denom = tb == Timebase::continuous ? 4.0 * rs.max_diag : 4.0;
        const double lo = rs.phi * rs.phi / denom, hi = rs.phi;
        record(r, within(lo, rs.lambda, hi), std::max({0.0, lo - rs.lambda, rs.lambda - hi}),
               repro("restricted_cheeger", seed, i) + " (" + std::string(to_string(tb)) + ") fails");
        ++r.instances;
      }
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_exit_tail(const VerifyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "exit_tail";
  for (std::size_t i = 0; i < cfg.cheeger_graphs; ++i) {
    const auto g = std::make_shared<const WeightedGraph>(suite_graph(seed, i));
    Rng rng(seed ^ 0xa5, i);
    for (Timebase tb : {Timebase::lazy, Timebase::continuous}) {
      const auto c = derive_chain(g, tb);
      for (int s = 0; s < 3; ++s) {
        const auto a = random_small_subset(c, rng);
        for (double t : cfg.exit_times) {
          const auto e = exit_tail_check(c, a, t);
          record(r, e.lhs <= e.rhs * (1 + kAssertTolerance) + 1e-15, std::max(0.0, e.lhs - e.rhs),
                 repro("exit_tail", seed, i) + ": t=" + format_double(t) + " " + format_double(e.lhs) + " > " +
                     format_double(e.rhs));
          ++r.instances;
        }
      }
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_eigen_compare(const VerifyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "eigen_compare";
  for (std::size_t i = 0; i < cfg.compare_pairs; ++i) {
    Rng rng(seed ^ 0xc0, i);
    const auto g = random_weighted_graph(random_size(rng), rng);
    const double eta = 0.05 + 0.95 * rng.uniform();
    std::vector<double> w;
    for (const auto& e : g.edges()) w.push_back(e.w * std::pow(1.0 + eta, 2.0 * rng.uniform() - 1.0));
    const Timebase tb = i % 2 ? Timebase::continuous : Timebase::lazy;
    const auto a = derive_chain(g, tb);
    const auto b = derive_chain(g.with_weights(w), tb);
    const auto cert = dirichlet_compare(a, b);
    const auto ec = eigen_compare_check(a, b, cert.c);
    record(r, cert.c > 0 && ec.pass && ec.avg_l2_pass, std::max(0.0, -ec.worst_margin),
           repro("eigen_compare", seed, i) + ": c=" + format_double(cert.c) +
               " avg-L2 ratio=" + format_double(ec.avg_l2_ratio));
    ++r.instances;
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_l2_identities(const VerifyConfig& cfg, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "l2_identities";
  for (std::size_t i = 0; i < cfg.cheeger_graphs; ++i) {
    const auto g = std::make_shared<const WeightedGraph>(suite_graph(seed, i));
    for (Timebase tb : {Timebase::lazy, Timebase::continuous}) {
      const auto l2 = l2_uniform_mixing(derive_chain(g, tb));
      record(r, l2.diag_residual < 1e-10 && l2.sandwich, l2.diag_residual,
             repro("l2_identities", seed, i) + ": residual " + format_double(l2.diag_residual) + ", mix2 " +
                 format_double(l2.mix2) + ", mixunif " + format_double(l2.mixunif));
      ++r.instances;
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

VerificationReport run_verification_suite(const VerifyConfig& cfg, std::uint64_t seed) {
  VerificationReport rep;
  rep.checks.push_back(check_bridged_path(cfg));
  rep.checks.push_back(check_conductance_split(cfg, seed));
  rep.checks.push_back(check_tree_lemma(cfg, seed));
  rep.checks.push_back(check_cheeger(cfg, seed));
  rep.checks.push_back(check_restricted_cheeger(cfg, seed));
  rep.checks.push_back(check_exit_tail(cfg, seed));
  rep.checks.push_back(check_eigen_compare(cfg, seed));
  rep.checks.push_back(check_l2_identities(cfg, seed));
  return rep;
}

}  // namespace mixsens
