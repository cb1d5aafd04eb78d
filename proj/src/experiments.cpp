#include "mixsens/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "mixsens/clock_graph.hpp"
#include "mixsens/interchange.hpp"
#include "mixsens/stats.hpp"
#include "mixsens/walkers.hpp"

namespace mixsens {

Provenance provenance_for(const ExperimentConfig& cfg) { return {cfg.hash(), cfg.seed, version_string()}; }

std::uint64_t sub_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
  return splitmix64(master ^ splitmix64(h + index));
}

void check_caps(const GadgetSpec& spec, const Caps& caps) {
  const auto r = size_report(spec);
  if (r.total > static_cast<double>(caps.max_vertices))
    throw Error("gadget with " + format_double(r.total) + " vertices exceeds the vertex cap " +
                std::to_string(caps.max_vertices));
  // adjacency, weights, tags and per-vertex annotations
  const double bytes = r.total * 160.0;
  if (bytes > static_cast<double>(caps.max_memory_mb) * 1024.0 * 1024.0)
    throw Error("gadget needs about " + format_double(std::ceil(bytes / 1048576.0)) + " MiB, over the cap of " +
                std::to_string(caps.max_memory_mb) + " MiB");
}

std::vector<double> geometric_grid(double lo, double hi, double factor) {
  if (!(lo > 0 && hi >= lo && factor > 1)) throw Error("geometric grid: need 0 < lo <= hi and factor > 1");
  std::vector<double> out;
  for (double t = lo; t <= hi * (1 + 1e-12); t *= factor) out.push_back(t);
  return out;
}

LowerCurve root_event_lower_curve(const GadgetGraph& g, std::vector<double> times, std::size_t trials,
                                  double confidence, std::uint64_t seed) {
  std::sort(times.begin(), times.end());
  LowerCurve c;
  c.times = times;
  c.trials = trials;
  c.pi_event = static_cast<double>(g.gadget_size()) / static_cast<double>(g.n());
  c.in_event = root_in_gadget_counts(g, times, trials, seed);
  for (std::size_t i = 0; i < times.size(); ++i) {
    c.tv_lower.push_back(tv_lower_from_event(c.in_event[i], trials, c.pi_event, confidence));
    if (c.tv_lower.back() > 0.25) c.t_low = std::max(c.t_low, times[i]);
  }
  return c;
}

GadgetGraph perturbed(const GadgetGraph& g, const std::string& kind, double delta) {
  if (kind == "bridges") return perturb_bridges(g);
  if (kind == "weights") return perturb_weights(g, delta);
  if (kind == "none") return g;
  throw Error("unknown perturbation '" + kind + "'");
}

namespace {

using I = std::int64_t;

double median_tk(const std::vector<TraversalTrial>& tr) {
  std::vector<double> t;
  for (const auto& x : tr) t.push_back(x.t_k);
  return quantile(t, 0.5);
}

double reach_fraction(const std::vector<TraversalTrial>& tr, std::size_t stage) {
  std::size_t k = 0;
  for (const auto& x : tr) k += x.reached[stage] != 0;
  return static_cast<double>(k) / static_cast<double>(tr.size());
}

}  // namespace

SeparationResult run_separation_experiment(const ExperimentConfig& cfg) {
  const auto& sc = cfg.separation;
  SeparationResult res;
  const auto kernel = coupling_kernel_from_string(sc.kernel);
  for (int u : sc.us) {
    try {
      auto spec = GadgetSpec::preset(sc.schedule, u, sc.eps);
      spec.clique_mult = sc.clique_mult;
      spec.max_vertices = cfg.caps.max_vertices;
      check_caps(spec, cfg.caps);
      const GadgetGraph g = build_gadget(spec);
      const GadgetGraph gp = perturbed(g, sc.perturbation, sc.delta);
      const auto uu = static_cast<std::uint64_t>(u);

      const auto up_g = coupling_mix_upper(g.graph, sc.coupling_trials, sc.quantile,
                                           sub_seed(cfg.seed, "couple-G", uu), kernel,
                                           std::numeric_limits<double>::infinity(), sc.confidence);
      const auto up_gp = coupling_mix_upper(gp.graph, sc.coupling_trials, sc.quantile,
                                            sub_seed(cfg.seed, "couple-G'", uu), kernel,
                                            std::numeric_limits<double>::infinity(), sc.confidence);
      if (!std::isfinite(up_g.t_up)) throw Error("coupling upper bound on G not certified");
      auto grid = geometric_grid(sc.grid_lo * up_g.t_up, sc.grid_hi * up_g.t_up, sc.grid_factor);
      grid.push_back(up_g.t_up);

      struct Side {
        const GadgetGraph* graph;
        const char* name;
        const MixUpper* up;
      };
      for (const Side& s : {Side{&g, "G", &up_g}, Side{&gp, "G'", &up_gp}}) {
        const auto curve = root_event_lower_curve(*s.graph, grid, sc.lower_trials, sc.confidence,
                                                  sub_seed(cfg.seed, std::string("lower-") + s.name, uu));
        double lb_at = 0.0;
        for (std::size_t i = 0; i < curve.times.size(); ++i) {
          if (curve.times[i] == up_g.t_up) lb_at = curve.tv_lower[i];
          if (std::string(s.name) == "G'")
            res.lower.add_row({curve.times[i], I(curve.trials), I(curve.in_event[i]), curve.pi_event,
                               curve.tv_lower[i]});
        }
        const auto trav = root_particle_traversal(*s.graph, sc.traversal_trials,
                                                  sub_seed(cfg.seed, std::string("traverse-") + s.name, uu));
        res.table.add_row({I(u), std::string(s.name), I(s.graph->gadget_size()), I(s.graph->n()), s.up->t_up,
                           I(s.up->order), curve.t_low, lb_at, curve.t_low / up_g.t_up, median_tk(trav),
                           reach_fraction(trav, static_cast<std::size_t>(u - 1))});
      }
      for (int i = 1; i <= u; ++i) {
        const auto ex = exit_time_stats(g, i, sc.exit_trials, sub_seed(cfg.seed, "exit", uu * 64 + i));
        res.exits.add_row({I(u), I(i), ex.scale, ex.worst_mean, ex.ratio});
      }
    } catch (const std::exception& e) {
      res.complete = false;
      res.error = "u=" + std::to_string(u) + ": " + e.what();
      break;
    }
  }
  return res;
}

ResultTable run_weighted_sweep(const ExperimentConfig& cfg) {
  const auto& sw = cfg.sweep;
  auto spec = GadgetSpec::preset(sw.schedule, sw.u, sw.eps);
  spec.clique_mult = sw.clique_mult;
  spec.max_vertices = cfg.caps.max_vertices;
  check_caps(spec, cfg.caps);
  const GadgetGraph g = build_gadget(spec);
  ResultTable t("weighted_sweep");
  for (std::size_t d = 0; d < sw.deltas.size(); ++d) {
    const double delta = sw.deltas[d];
    const GadgetGraph gp = delta > 0 ? perturb_weights(g, delta) : g;
    const auto trav = root_particle_traversal(gp, sw.trials, sub_seed(cfg.seed, "sweep", d));
    const double med = median_tk(trav);
    const double p = biased_left_probability(delta);
    for (int i = 0; i < sw.u; ++i) {
      std::size_t k = 0;
      for (const auto& x : trav) k += x.reached[static_cast<std::size_t>(i)] != 0;
      const unsigned s = spec.depths[static_cast<std::size_t>(i)];
      t.add_row({delta, I(i + 1), I(sw.trials), I(k), static_cast<double>(k) / static_cast<double>(sw.trials), med,
                 binomial_tail_above(s, p, spec.bad_threshold(i))});
    }
  }
  return t;
}

ClockResult run_clock_experiment(const ExperimentConfig& cfg) {
  const auto& cc = cfg.clock;
  ClockResult res;
  const ClockAuxGraph h = build_clock_aux(cc.m, std::nullopt, cfg.caps.max_vertices);
  const I m = cc.m;
  auto fail = [&](std::string what) {
    res.pass = false;
    res.failures.push_back(std::move(what));
  };

  const auto uh = uniform_hitting_check(h);
  res.table.add_row({m, std::string("uniform_hitting"), I(-1), uh.max_error, 0.0, 0.0});
  if (!(uh.max_error < 1e-10)) fail("uniform hitting error " + format_double(uh.max_error));

  std::vector<Vertex> starts;
  for (std::size_t j = 0; j < cc.starts; ++j) starts.push_back(static_cast<Vertex>(j * h.n() / cc.starts));
  const double scale = std::ldexp(1.0, cc.m) / static_cast<double>(h.n());
  const auto exact = exact_hitting_times_to_B(h, starts);
  const auto sampled = sampled_hitting_times_to_B(h, starts, cc.hitting_trials, sub_seed(cfg.seed, "clock-hit"));
  for (std::size_t j = 0; j < starts.size(); ++j) {
    const double r = sampled[j].mean * scale;
    res.table.add_row({m, std::string("hitting_ratio"), I(starts[j]), r, exact[j] * scale,
                       sampled[j].stderr_mean() * scale});
    if (!(r >= 0.1 && r <= 10.0)) fail("hitting ratio " + format_double(r) + " at " + std::to_string(starts[j]));
  }

  const Vertex a = h.A.front();
  const double pr = return_probability(h, a);
  res.table.add_row({m, std::string("return_probability"), I(a), pr, pr, 0.0});
  for (std::size_t b = 0; b < cc.swap_boosts.size(); ++b) {
    const double boost = cc.swap_boosts[b];
    const double q = boost / (1.0 + boost);
    const double f = p_even_formula(q, pr);
    const auto est = p_even_monte_carlo(h, a, boost, cc.p_even_trials, sub_seed(cfg.seed, "p-even", b));
    res.table.add_row({m, std::string("p_even_q=") + format_double(q), I(a), est.p_hat(), f, est.stderr_p()});
    if (!(std::abs(est.p_hat() - f) <= 3.0 * est.stderr_p()))
      fail("p_even at q=" + format_double(q) + ": " + format_double(est.p_hat()) + " vs " + format_double(f));
  }

  for (const auto& r : product_chain_smoke(h, a, cc.smoke_steps, sub_seed(cfg.seed, "smoke")))
    res.returns.add_row({I(r.step), I(r.b), I(r.sigma_rank), I(r.swaps)});
  return res;
}

}  // namespace mixsens
