// One line per acceptance criterion; exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "mixsens/clock_graph.hpp"
#include "mixsens/electrical.hpp"
#include "mixsens/experiments.hpp"
#include "mixsens/interchange.hpp"
#include "mixsens/spectral.hpp"
#include "mixsens/stats.hpp"
#include "mixsens/verification.hpp"
#include "mixsens/walkers.hpp"
#include "oracles.hpp"

using namespace mixsens;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(const char* id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::shared_ptr<const WeightedGraph> suite_graph(std::size_t i) {
  Rng rng(kSeed, i);
  return std::make_shared<const WeightedGraph>(random_weighted_graph(3 + rng.below(10), rng));
}

Outcome bridged_path_resistance() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int n : {1, 2, 5, 10, 25}) {
    const double r = effective_resistance(bridged_path(static_cast<std::size_t>(n)), 0, static_cast<Vertex>(2 * n)).value;
    worst = std::max(worst, std::abs(r - 2.0 * n / 3.0));
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-9 && s < 1.0, "max |R - 2N/3| = " + num(worst) + ", " + num(s) + " s"};
}

Outcome conductance_split() {
  double worst = 0.0;
  std::size_t max_n = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng(kSeed ^ 0x11, i);
    const auto inst = random_cut_vertex_graph(200, rng);
    max_n = std::max(max_n, inst.graph.n());
    const auto split = hitting_split(inst.graph, inst.v, inst.targets);
    const auto ref = oracle::absorption(inst.graph, inst.v, inst.targets);
    for (std::size_t j = 0; j < ref.size(); ++j)
      worst = std::max(worst, std::abs(split.conductance_law[j] - ref[j]));
  }
  return {worst <= 1e-10 && max_n <= 200, "100 graphs (n <= " + std::to_string(max_n) + "), max deviation " + num(worst)};
}

Outcome tree_lemma() {
  const int d = 40;
  double worst_excess = -1.0, worst_tight = 0.0;
  for (int i = 0; i < 20; ++i) {
    Rng rng(kSeed ^ 0x22, static_cast<std::uint64_t>(i));
    const auto f = random_stretch_function(d, rng);
    for (int k = 1; k < d; ++k)
      if (f[static_cast<std::size_t>(k)] > f[static_cast<std::size_t>(k - 1)]) return {false, "generator not monotone"};
    for (int h = 1; h <= 10; ++h)
      worst_excess = std::max(worst_excess, stretched_tree_root_hit(f, h, d) - (std::ldexp(1.0, -h) + std::ldexp(1.0, -(d - h))));
  }
  const std::vector<double> ones(d, 1.0);
  for (int h = 1; h <= 10; ++h) {
    const double bound = std::ldexp(1.0, -h) + std::ldexp(1.0, -(d - h));
    worst_tight = std::max(worst_tight, std::abs(stretched_tree_root_hit(ones, h, d) - bound));
  }
  return {worst_excess <= 1e-12 && worst_tight <= 1e-6,
          "max(p - bound) = " + num(worst_excess) + ", |p - bound| at f=1: " + num(worst_tight)};
}

Outcome cheeger_sandwiches() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t checked = 0, bad = 0;
  double worst_lib = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto g = suite_graph(i);
    Rng rng(kSeed ^ 0x33, i);
    for (Timebase tb : {Timebase::lazy, Timebase::continuous}) {
      const auto oc = oracle::chain(*g, tb);
      const auto ch = derive_chain(g, tb);
      const auto ev = oracle::eigenvalues(oc, oracle::all(g->n()));
      const double lam2 = ev(1);
      const double phi = oracle::phi(oc, oracle::all(g->n()), true);
      const double maxdiag = oc.op.diagonal().maxCoeff();
      const double lo = tb == Timebase::lazy ? phi * phi / 2 : phi * phi / (2 * maxdiag);
      worst_lib = std::max({worst_lib, std::abs(spectrum(ch).gap - lam2), std::abs(cheeger(ch).phi - phi)});
      bad += !(lo <= lam2 * (1 + 1e-10) && lam2 <= 2 * phi * (1 + 1e-10));
      ++checked;
      for (int s = 0; s < 3; ++s) {
        const auto a = random_small_subset(ch, rng);
        const double lam_a = oracle::eigenvalues(oc, a)(0);
        const double phi_a = oracle::phi(oc, a, false);
        double md = 1.0;
        if (tb == Timebase::continuous) {
          md = 0.0;
          for (Vertex x : a) md = std::max(md, oc.op(x, x));
        }
        const double lo_a = phi_a * phi_a / (4 * md);
        const auto rs = restricted(ch, a);
        worst_lib = std::max({worst_lib, std::abs(rs.lambda - lam_a), std::abs(rs.phi - phi_a)});
        bad += !(lo_a <= lam_a * (1 + 1e-10) && lam_a <= phi_a * (1 + 1e-10));
        ++checked;
      }
    }
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {bad == 0 && worst_lib < 1e-9 && s < 120,
          std::to_string(checked) + " sandwiches, " + std::to_string(bad) + " violated, library vs reference " +
              num(worst_lib)};
}

Outcome exit_tail() {
  std::size_t checked = 0, bad = 0;
  double worst_lib = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto g = suite_graph(i);
    Rng rng(kSeed ^ 0x33, i);
    for (Timebase tb : {Timebase::lazy, Timebase::continuous}) {
      const auto oc = oracle::chain(*g, tb);
      const auto ch = derive_chain(g, tb);
      for (int s = 0; s < 3; ++s) {
        const auto a = random_small_subset(ch, rng);
        const double lam_a = oracle::eigenvalues(oc, a)(0);
        for (double t : {1.0, 3.0, 10.0}) {
          const double p = oracle::exit_tail(oc, a, t, tb);
          const auto lib = exit_tail_check(ch, a, t);
          worst_lib = std::max(worst_lib, std::abs(lib.lhs - p));
          bad += !(p <= std::exp(-lam_a * t) * (1 + 1e-10) + 1e-15);
          ++checked;
        }
      }
    }
  }
  return {bad == 0 && worst_lib < 1e-9,
          std::to_string(checked) + " (set, t) pairs, " + std::to_string(bad) + " violated, library vs reference " +
              num(worst_lib)};
}

Outcome eigen_comparison() {
  std::size_t bad = 0;
  double worst_ratio = 0.0, worst_c_diff = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    Rng rng(kSeed ^ 0x44, i);
    const auto g = random_weighted_graph(3 + rng.below(10), rng);
    std::vector<double> w;
    for (const auto& e : g.edges()) w.push_back(e.w * std::pow(1.5, 2 * rng.uniform() - 1));
    const auto gp = g.with_weights(w);
    const Timebase tb = i % 2 ? Timebase::continuous : Timebase::lazy;
    const auto a = oracle::chain(g, tb), b = oracle::chain(gp, tb);
    // c from the definition: pairwise flow and stationary ratios
    double c = 1.0;
    for (long x = 0; x < a.pi.size(); ++x) {
      c = std::min({c, a.pi(x) / b.pi(x), b.pi(x) / a.pi(x)});
      for (long y = 0; y < a.pi.size(); ++y) {
        const double qa = -a.pi(x) * a.op(x, y), qb = -b.pi(x) * b.op(x, y);
        if (x != y && qa > 0) c = std::min({c, qa / qb, qb / qa});
      }
    }
    const auto lib = dirichlet_compare(derive_chain(g, tb), derive_chain(gp, tb));
    worst_c_diff = std::max(worst_c_diff, std::abs(lib.c - c));
    const auto la = oracle::eigenvalues(a, oracle::all(g.n())), lb = oracle::eigenvalues(b, oracle::all(g.n()));
    for (long k = 0; k < la.size(); ++k)
      bad += !(c * c * la(k) <= lb(k) + 1e-12 && lb(k) <= la(k) / (c * c) + 1e-12);
    std::vector<double> va(la.data(), la.data() + la.size()), vb(lb.data(), lb.data() + lb.size());
    const double ta = avg_l2_mixing(va, tb), tbb = avg_l2_mixing(vb, tb);
    const double ratio = std::max(ta / tbb, tbb / ta);
    worst_ratio = std::max(worst_ratio, ratio / (1 / (c * c) + 1));
    bad += ratio > 1 / (c * c) + 1;
  }
  return {bad == 0 && worst_c_diff < 1e-12,
          "100 pairs, " + std::to_string(bad) + " violations, max avg-L2 ratio / (1/c^2+1) = " + num(worst_ratio)};
}

Outcome l2_identities() {
  double worst_res = 0.0;
  std::size_t sandwich_bad = 0, checked = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto g = suite_graph(i);
    for (Timebase tb : {Timebase::lazy, Timebase::continuous}) {
      const auto oc = oracle::chain(*g, tb);
      // ||P_x(t) - pi||^2 + 1 = P_{2t}(x,x) / pi(x)
      for (double t : {1.0, 2.0, 5.0}) {
        const auto pt = oracle::transition(oc, t, tb), p2t = oracle::transition(oc, 2 * t, tb);
        for (long x = 0; x < oc.pi.size(); ++x) {
          double l2 = 0.0;
          for (long y = 0; y < oc.pi.size(); ++y) l2 += std::pow(pt(x, y) - oc.pi(y), 2) / oc.pi(y);
          worst_res = std::max(worst_res, std::abs(l2 + 1 - p2t(x, x) / oc.pi(x)));
        }
      }
      const auto lib = l2_uniform_mixing(derive_chain(g, tb));
      worst_res = std::max(worst_res, lib.diag_residual);
      sandwich_bad += !(lib.mix2 <= lib.mixunif + 1e-9 && lib.mixunif <= 2 * lib.mix2 + 1e-9);
      ++checked;
    }
  }
  return {worst_res < 1e-10 && sandwich_bad == 0,
          std::to_string(checked) + " chains, diagonal residual " + num(worst_res) + ", sandwich violations " +
              std::to_string(sandwich_bad)};
}

Outcome exact_tv() {
  const auto ex2 = build_exact_interchange(build_basic(BasicShape::path, 1));
  std::vector<double> ts;
  for (int i = 0; i <= 200; ++i) ts.push_back(0.025 * i);
  const auto tv2 = exact_tv_curve(ex2, Timebase::continuous, ts);
  double err = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) err = std::max(err, std::abs(tv2[i] - std::exp(-2 * ts[i]) / 2));
  const double mix2 = exact_mixing_time(ex2, Timebase::continuous);
  const double mix_err = std::abs(mix2 - std::numbers::ln2 / 2);

  const auto ex4 = build_exact_interchange(build_basic(BasicShape::complete, 4));
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.01 * i);
  const auto tv4 = exact_tv_curve(ex4, Timebase::continuous, grid);
  bool monotone = true;
  int crossings = 0;
  for (std::size_t i = 1; i < tv4.size(); ++i) {
    monotone = monotone && tv4[i] <= tv4[i - 1] + 1e-14;
    crossings += (tv4[i - 1] > 0.25) != (tv4[i] > 0.25);
  }
  return {err <= 1e-9 && mix_err <= 1e-6 && monotone && crossings == 1,
          "n=2 curve error " + num(err) + ", mixing time error " + num(mix_err) + "; K4 monotone=" +
              (monotone ? "yes" : "no") + ", crossings of 1/4: " + std::to_string(crossings)};
}

Outcome coupling() {
  // marginal law: swaps of a watched edge within [0, 1] are Poisson(w) in each copy
  GraphBuilder b(4);
  b.add_edge(0, 1, 1.0);
  b.add_edge(1, 2, 0.5);
  b.add_edge(2, 3, 2.0);
  b.add_edge(3, 0, 1.5);
  b.add_edge(0, 2, 1.0);
  const auto g = std::move(b).build();
  const std::size_t trials = 120000;
  CouplingOptions opt;
  opt.horizon = 1.0;
  opt.stop_at_coalescence = false;
  opt.watch_edge = 0;
  std::vector<std::uint64_t> ca(12, 0), cb(12, 0);
  std::uint64_t events = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(kSeed ^ 0x55, t);
    const auto sb = InterchangeState::from_permutation(random_permutation(4, rng));
    const auto r = couple_interchange(g, InterchangeState::identity(4), sb, opt, rng);
    ++ca[std::min<std::uint64_t>(r.watched_swaps_a, 11)];
    ++cb[std::min<std::uint64_t>(r.watched_swaps_b, 11)];
    events += r.watched_swaps_a;
  }
  std::vector<double> pois(12);
  double rest = 1.0;
  for (int k = 0; k < 11; ++k) rest -= (pois[static_cast<std::size_t>(k)] = poisson_weight(1.0, static_cast<std::size_t>(k)));
  pois[11] = rest;
  const double pa = chi_square_gof(ca, pois).p_value, pb = chi_square_gof(cb, pois).p_value;

  // single edge from opposite states: coalescence ~ Exp(2)
  const auto edge = build_basic(BasicShape::path, 1);
  RunningStats lit, red;
  for (std::size_t t = 0; t < 20000; ++t) {
    Rng r1(kSeed ^ 0x66, t), r2(kSeed ^ 0x77, t);
    const auto r = couple_interchange(edge, InterchangeState::identity(2), InterchangeState::from_permutation({1, 0}),
                                      CouplingOptions{}, r1);
    lit.add(r.coalescence_time);
    const std::vector<std::uint32_t> id{0, 1}, sw{1, 0};
    red.add(couple_reduced(edge, id, sw, INFINITY, r2));
  }
  const bool mean_ok = std::abs(lit.mean - 0.5) <= 3 * lit.stderr_mean() && std::abs(red.mean - 0.5) <= 3 * red.stderr_mean();

  // coupling upper bound never below the exact mixing time
  std::vector<WeightedGraph> small = {build_basic(BasicShape::path, 2), build_basic(BasicShape::path, 3),
                                      build_basic(BasicShape::path, 4), build_basic(BasicShape::cycle, 4),
                                      build_basic(BasicShape::cycle, 5), build_basic(BasicShape::complete, 4),
                                      build_basic(BasicShape::complete, 5)};
  const std::vector<double> star_w{1.0, 2.0, 0.5, 1.0};
  small.push_back(build_star(star_w));
  int violations = 0;
  double min_gap = INFINITY;
  for (std::size_t i = 0; i < small.size(); ++i) {
    const double exact = exact_mixing_time(build_exact_interchange(small[i]), Timebase::continuous);
    for (auto kernel : {CouplingKernel::literal, CouplingKernel::reduced}) {
      const double up = coupling_mix_upper(small[i], 2000, 0.75, kSeed + i, kernel).t_up;
      violations += up < exact;
      min_gap = std::min(min_gap, up / exact);
    }
  }
  return {pa > 0.001 && pb > 0.001 && events >= 100000 && mean_ok && violations == 0,
          "swap-law p = " + num(pa) + " / " + num(pb) + " (" + std::to_string(events) + " events); coalescence mean " +
              num(lit.mean) + " +- " + num(lit.stderr_mean()) + " (reduced " + num(red.mean) +
              "); min t_up / t_mix over " + std::to_string(small.size()) + " graphs = " + num(min_gap)};
}

Outcome biased_tree() {
  std::string detail;
  bool ok = true;
  for (double delta : {0.0, 1.0, 3.0}) {
    const auto counts = biased_level_statistic(delta, 12, 100000, 40, kSeed + static_cast<std::uint64_t>(delta));
    const double s = std::sqrt(1 + delta), p = s / (1 + s);
    std::vector<double> probs;
    for (unsigned j = 0; j <= 12; ++j) probs.push_back(binomial_pmf(j, 12, p));
    const double pv = chi_square_gof(counts, probs).p_value;
    ok = ok && pv > 0.001;
    detail += (detail.empty() ? "" : ", ") + std::string("p(delta=") + num(delta) + ") = " + num(pv);
  }
  return {ok, detail};
}

ExperimentConfig separation_config() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.separation.us = {2, 3, 4};
  return cfg;
}

Outcome theorem_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_separation_experiment(separation_config());
  if (!r.complete) return {false, "incomplete: " + r.error};
  // (a) normalized exit means comparable across stages
  bool a_ok = true;
  std::string a_detail;
  for (int u : {2, 3, 4}) {
    double lo = INFINITY, hi = 0;
    for (std::size_t i = 0; i < r.exits.rows(); ++i)
      if (r.exits.number(i, "u") == u) {
        lo = std::min(lo, r.exits.number(i, "ratio"));
        hi = std::max(hi, r.exits.number(i, "ratio"));
      }
    a_ok = a_ok && hi / lo <= 8;
    a_detail += (a_detail.empty() ? "" : "/") + num(hi / lo);
  }
  // (b), (c) on the perturbed rows
  bool b_ok = true, c_ok = true;
  double prev = -INFINITY;
  std::string b_detail, c_detail;
  for (std::size_t i = 0; i < r.table.rows(); ++i) {
    if (std::get<std::string>(r.table.row(i)[1]) != "G'") continue;
    const double u = r.table.number(i, "u"), lb = r.table.number(i, "lb_at_t_up"), ratio = r.table.number(i, "ratio");
    if (u >= 3) b_ok = b_ok && lb > 0.25;
    c_ok = c_ok && ratio > prev;
    prev = ratio;
    b_detail += (b_detail.empty() ? "" : "/") + num(lb);
    c_detail += (c_detail.empty() ? "" : "/") + num(ratio);
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {a_ok && b_ok && c_ok && s < 1800,
          std::string("(a) ") + (a_ok ? "ok" : "FAIL") + " max/min exit ratio u=2/3/4: " + a_detail + "; (b) " +
              (b_ok ? "ok" : "FAIL") + " LB on G' at t_up(G): " + b_detail + "; (c) " + (c_ok ? "ok" : "FAIL") +
              " ratio by u: " + c_detail};
}

Outcome clock_graph() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  const ClockAuxGraph h = build_clock_aux(1);
  const auto uh = uniform_hitting_check(h);
  const auto r = run_clock_experiment(cfg);
  double lo = INFINITY, hi = 0;
  int starts = 0;
  std::string p_detail;
  bool p_ok = true;
  for (std::size_t i = 0; i < r.table.rows(); ++i) {
    const auto& check = std::get<std::string>(r.table.row(i)[1]);
    if (check == "hitting_ratio") {
      lo = std::min(lo, r.table.number(i, "value"));
      hi = std::max(hi, r.table.number(i, "value"));
      ++starts;
    } else if (check.starts_with("p_even")) {
      const double v = r.table.number(i, "value"), ref = r.table.number(i, "reference"), se = r.table.number(i, "stderr");
      p_ok = p_ok && std::abs(v - ref) <= 3 * se;
      p_detail += (p_detail.empty() ? "" : ", ") + num((v - ref) / se) + " sigma";
    }
  }
  const bool ok = uh.max_error < 1e-10 && starts == 20 && lo >= 0.1 && hi <= 10 && p_ok && r.failures.empty();
  return {ok, "uniform-hitting error " + num(uh.max_error) + "; E[T_B] 2^m/|H| in [" + num(lo) + ", " + num(hi) +
                  "] over " + std::to_string(starts) + " starts; p_even deviations " + p_detail};
}

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.separation.us = {2};
  cfg.separation.coupling_trials = 60;
  cfg.separation.lower_trials = 500;
  cfg.separation.traversal_trials = 200;
  cfg.separation.exit_trials = 50;
  cfg.clock.hitting_trials = 20;
  cfg.clock.p_even_trials = 5000;
  cfg.clock.smoke_steps = 20000;
  cfg.verify.cheeger_graphs = 20;
  const auto prov = provenance_for(cfg);
  auto render = [&] {
    const auto sep = run_separation_experiment(cfg);
    const auto clk = run_clock_experiment(cfg);
    return sep.table.to_csv(prov) + sep.exits.to_csv(prov) + sep.lower.to_csv(prov) +
           run_weighted_sweep(cfg).to_csv(prov) + clk.table.to_csv(prov) + clk.returns.to_csv(prov) +
           run_verification_suite(cfg.verify, cfg.seed).table().to_csv(prov);
  };
  const auto a = render(), b = render();
  return {a == b && !a.empty(), std::to_string(a.size()) + " bytes of CSV, identical=" + (a == b ? "yes" : "no")};
}

}  // namespace

int main() {
  run("C01", "bridged-path resistance", bridged_path_resistance);
  run("C02", "conductance split", conductance_split);
  run("C03", "stretched-tree root hit", tree_lemma);
  run("C04", "Cheeger sandwiches", cheeger_sandwiches);
  run("C05", "exit tail", exit_tail);
  run("C06", "eigenvalue comparison", eigen_comparison);
  run("C07", "L2 identities", l2_identities);
  run("C08", "exact interchange TV", exact_tv);
  run("C09", "coupling validity", coupling);
  run("C10", "biased-tree law", biased_tree);
  run("C11", "separation trend at desk scale", theorem_trend);
  run("C12", "clock graph", clock_graph);
  run("C13", "determinism", determinism);
  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
