#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mixsens/clock_graph.hpp"
#include "mixsens/config.hpp"
#include "mixsens/electrical.hpp"
#include "mixsens/experiments.hpp"
#include "mixsens/gadget.hpp"
#include "mixsens/interchange.hpp"
#include "mixsens/parallel.hpp"
#include "mixsens/spectral.hpp"
#include "mixsens/verification.hpp"
#include "mixsens/walkers.hpp"

using namespace mixsens;
using nlohmann::ordered_json;
using I = std::int64_t;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int threads = 0;
  std::optional<std::size_t> cap_mem;
};

struct GadgetArgs {
  std::string file;
  std::string schedule = "desk";
  int u = 2;
  double eps = 0.2;
  double clique_mult = 4.0;
  std::optional<std::size_t> clique_size;
  std::optional<std::uint64_t> labeling_seed;
  std::string perturb = "none";
  double delta = 2.0;

  void add_to(CLI::App* app) {
    app->add_option("--gadget", file, "gadget JSON written by build-gadget");
    app->add_option("--schedule", schedule, "paper | mini | desk")->check(CLI::IsMember({"paper", "mini", "desk"}));
    app->add_option("--u", u, "stage count");
    app->add_option("--eps", eps, "bad-leaf threshold parameter");
    app->add_option("--clique-mult", clique_mult, "|K| as a multiple of the gadget size");
    app->add_option("--clique-size", clique_size, "explicit |K|");
    app->add_option("--labeling-seed", labeling_seed, "random relabeling of tree children");
    app->add_option("--perturb", perturb, "none | bridges | weights")
        ->check(CLI::IsMember({"none", "bridges", "weights"}));
    app->add_option("--delta", delta, "left-edge weight excess for --perturb weights");
  }

  GadgetGraph build(const Caps& caps) const {
    GadgetGraph g;
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw Error("cannot read " + file);
      std::stringstream ss;
      ss << in.rdbuf();
      g = gadget_from_json(ss.str());
    } else {
      auto spec = GadgetSpec::preset(schedule, u, eps);
      spec.clique_mult = clique_mult;
      spec.clique_size = clique_size;
      spec.max_vertices = caps.max_vertices;
      check_caps(spec, caps);
      g = build_gadget(spec, labeling_seed);
    }
    return perturbed(g, perturb, delta);
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void banner(const std::string& kind, const std::string& claim) {
  std::cerr << "==> " << kind << ": " << claim << "\n";
}

void trend_banner(const std::string& claim) {
  banner("TREND CHECK at desk scale (constants and asymptotics are not reproduced)", claim);
}

class Session {
 public:
  Globals g;
  ExperimentConfig cfg;

  void load() {
    if (!g.config_path.empty()) cfg = load_config(g.config_path);
    if (g.seed) cfg.seed = *g.seed;
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    if (g.cap_mem) cfg.caps.max_memory_mb = *g.cap_mem;
    set_threads(g.threads);
  }

  Provenance prov() const { return provenance_for(cfg); }

  std::string path(const std::string& name) const {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
  }

  void write(const ResultTable& t, const std::string& name) const {
    const auto p = path(name);
    t.write(p, prov());
    std::cerr << "wrote " << p << " (" << t.rows() << " rows)\n";
  }

  void emit_json(const ordered_json& j) const {
    ordered_json out;
    out["seed"] = cfg.seed;
    out["config_hash"] = cfg.hash();
    out["version"] = version_string();
    for (const auto& [k, v] : j.items()) out[k] = v;
    std::cout << out.dump(2) << "\n";
  }
};

std::vector<Vertex> parse_ids(const std::string& s) {
  std::vector<Vertex> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(static_cast<Vertex>(std::stoul(tok)));
  return out;
}

ordered_json vec_json(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixing-time sensitivity toolkit: gadget graphs, interchange processes, exact checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Session s;
  app.add_option("--config", s.g.config_path, "JSON experiment config");
  app.add_option("--seed", s.g.seed, "master seed (overrides the config)");
  app.add_option("--out-dir", s.g.out_dir, "directory for CSV outputs");
  app.add_option("--threads", s.g.threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--cap-mem", s.g.cap_mem, "memory cap in MiB for graph construction");
  app.set_version_flag("--version", version_string());

  int status = 0;

  // build-gadget
  auto* bg = app.add_subcommand("build-gadget", "build the gadget graph and export its JSON description");
  GadgetArgs bg_args;
  std::string bg_out, bg_graph_out;
  bool bg_report_only = false;
  bg_args.add_to(bg);
  bg->add_option("--out", bg_out, "JSON output path (stdout when empty)");
  bg->add_option("--graph-out", bg_graph_out, "also save the graph in text format");
  bg->add_flag("--size-only", bg_report_only, "only print the size report");
  bg->callback([&] {
    s.load();
    if (bg_report_only) {
      auto spec = GadgetSpec::preset(bg_args.schedule, bg_args.u, bg_args.eps);
      spec.clique_mult = bg_args.clique_mult;
      spec.clique_size = bg_args.clique_size;
      const auto r = size_report(spec);
      ordered_json j;
      j["gadget"] = r.gadget;
      j["boundary"] = r.boundary;
      j["clique"] = r.clique;
      j["total"] = r.total;
      s.emit_json(j);
      return;
    }
    const auto g = bg_args.build(s.cfg.caps);
    const auto text = gadget_to_json(g);
    if (bg_out.empty()) std::cout << text << "\n";
    else {
      std::ofstream(bg_out, std::ios::binary) << text << "\n";
      std::cerr << "wrote " << bg_out << ": n=" << g.n() << " gadget=" << g.gadget_size() << " |K|=" << g.k_size
                << "\n";
    }
    if (!bg_graph_out.empty()) save_graph(g.graph, bg_graph_out);
  });

  // electrical
  auto* el = app.add_subcommand("electrical", "effective resistance, conductance split, stretched-tree hitting");
  el->require_subcommand(1);
  std::string el_graph, el_targets, el_f;
  Vertex el_a = 0, el_b = 1;
  int el_h = 1, el_depth = 40;
  auto* el_res = el->add_subcommand("resistance", "effective resistance between two vertices");
  el_res->add_option("--graph", el_graph)->required();
  el_res->add_option("--a", el_a);
  el_res->add_option("--b", el_b);
  el_res->callback([&] {
    s.load();
    const auto r = effective_resistance(load_graph(el_graph), el_a, el_b);
    s.emit_json({{"value", r.value}, {"method", r.method}, {"residual", r.residual}});
  });
  auto* el_split = el->add_subcommand("split", "hitting distribution of targets from a cut vertex");
  el_split->add_option("--graph", el_graph)->required();
  el_split->add_option("--v", el_a, "cut vertex");
  el_split->add_option("--targets", el_targets, "comma-separated, one per component")->required();
  el_split->callback([&] {
    s.load();
    const auto ids = parse_ids(el_targets);
    const auto r = hitting_split(load_graph(el_graph), el_a, ids);
    s.emit_json({{"value", r.max_difference},
                 {"method", "conductance-vs-absorption"},
                 {"conductances", vec_json(r.conductances)},
                 {"conductance_law", vec_json(r.conductance_law)},
                 {"absorption", vec_json(r.absorption)}});
    if (r.max_difference > 1e-10) status = 1;
  });
  auto* el_tree = el->add_subcommand("tree-hit", "root-hit probability on a stretched binary tree");
  el_tree->add_option("--f", el_f, "comma-separated stretch lengths f(1),f(2),... (padded with the last value)");
  el_tree->add_option("--level", el_h, "start level h");
  el_tree->add_option("--depth", el_depth, "truncation depth");
  el_tree->callback([&] {
    s.load();
    std::vector<double> f;
    std::stringstream ss(el_f);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) f.push_back(parse_double(tok));
    if (f.empty()) f.push_back(1.0);
    while (f.size() < static_cast<std::size_t>(el_depth)) f.push_back(f.back());
    f.resize(static_cast<std::size_t>(el_depth));
    const double p = stretched_tree_root_hit(f, el_h, el_depth);
    s.emit_json({{"value", p},
                 {"method", "series-parallel-levels"},
                 {"residual", 0.0},
                 {"bound", std::ldexp(1.0, -el_h) + std::ldexp(1.0, -(el_depth - el_h))}});
  });

  // spectral
  auto* sp = app.add_subcommand("spectral", "eigenvalues, Cheeger constants, mixing times, comparison");
  std::string sp_graph, sp_tb = "lazy", sp_subset, sp_compare;
  sp->add_option("--graph", sp_graph)->required();
  sp->add_option("--timebase", sp_tb, "lazy | ct")->check(CLI::IsMember({"lazy", "ct", "continuous"}));
  sp->add_option("--subset", sp_subset, "comma-separated vertex ids for the restricted quantities");
  sp->add_option("--compare", sp_compare, "second graph on the same vertex set");
  sp->callback([&] {
    s.load();
    const Timebase tb = sp_tb == "lazy" ? Timebase::lazy : Timebase::continuous;
    const auto c = derive_chain(load_graph(sp_graph), tb);
    const auto spec = spectrum(c);
    ordered_json j;
    j["timebase"] = std::string(to_string(tb));
    j["eigenvalues"] = vec_json(spec.eigenvalues);
    j["gap"] = spec.gap;
    j["relaxation_time"] = spec.relaxation_time;
    if (c.n() <= kExactCheegerCap) {
      const auto ch = cheeger(c);
      j["phi"] = ch.phi;
      j["cheeger_set"] = ch.set;
    }
    const auto avg = avg_l2_mixing(c);
    j["avg_l2_mixing"] = avg.time;
    j["avg_l2_trace_residual"] = avg.trace_residual;
    const auto l2 = l2_uniform_mixing(c);
    j["mix2"] = l2.mix2;
    j["mixunif"] = l2.mixunif;
    j["l2_diag_residual"] = l2.diag_residual;
    j["l2_sandwich"] = l2.sandwich;
    if (!sp_subset.empty()) {
      const auto rs = restricted(c, parse_ids(sp_subset));
      j["lambda_A"] = rs.lambda;
      j["phi_A"] = rs.phi;
      j["phi_A_set"] = rs.argmin;
    }
    if (!sp_compare.empty()) {
      const auto c2 = derive_chain(load_graph(sp_compare), tb);
      const auto cert = dirichlet_compare(c, c2);
      j["comparison_c"] = cert.c;
      if (!cert.diagnostic.empty()) j["comparison_diagnostic"] = cert.diagnostic;
      if (cert.c > 0) {
        const auto ec = eigen_compare_check(c, c2, cert.c);
        j["eigen_comparison_pass"] = ec.pass;
        j["avg_l2_ratio"] = ec.avg_l2_ratio;
        j["avg_l2_pass"] = ec.avg_l2_pass;
        if (!ec.pass || !ec.avg_l2_pass) status = 1;
      }
    }
    if (!l2.sandwich) status = 1;
    s.emit_json(j);
  });

  // walk
  auto* wk = app.add_subcommand("walk", "random-walk trials from one start until a stop set or horizon");
  std::string wk_graph, wk_tb = "ct", wk_stop;
  GadgetArgs wk_gadget;
  Vertex wk_start = 0;
  std::size_t wk_trials = 100;
  double wk_horizon = 1e6;
  wk->add_option("--graph", wk_graph, "graph text file (otherwise a gadget is built)");
  wk_gadget.add_to(wk);
  wk->add_option("--timebase", wk_tb, "lazy | ct")->check(CLI::IsMember({"lazy", "ct", "continuous"}));
  wk->add_option("--start", wk_start);
  wk->add_option("--trials", wk_trials);
  wk->add_option("--horizon", wk_horizon);
  wk->add_option("--stop", wk_stop, "comma-separated stop vertices, or 'K' for the clique");
  wk->callback([&] {
    s.load();
    std::optional<GadgetGraph> gg;
    WeightedGraph graph;
    if (!wk_graph.empty()) graph = load_graph(wk_graph);
    else {
      gg = wk_gadget.build(s.cfg.caps);
      graph = gg->graph;
    }
    const auto c = derive_chain(graph, wk_tb == "lazy" ? Timebase::lazy : Timebase::continuous);
    VertexMask stop(c.n(), 0);
    if (wk_stop == "K") {
      if (!gg) throw Error("--stop K needs a gadget");
      for (Vertex v = gg->k_first; v < c.n(); ++v) stop[v] = 1;
    } else {
      for (Vertex v : parse_ids(wk_stop)) stop.at(v) = 1;
    }
    WalkOptions opt;
    opt.horizon = wk_horizon;
    opt.stop_set = &stop;
    const Walker w(c, opt);
    ResultTable t("walk");
    const auto traces = run_trials<WalkTrace>(wk_trials, [&](std::size_t i) { return w.run(wk_start, s.cfg.seed, i); });
    for (const auto& tr : traces)
      t.add_row({I(tr.seed), I(tr.trial), I(tr.start), I(tr.hit), tr.hit_time, tr.end_time, I(tr.end_vertex),
                 I(tr.jumps)});
    s.write(t, "walk.csv");
  });

  // exit-times
  auto* ex = app.add_subcommand("exit-times", "exit times of each stage H_i against l_i^2 s_i");
  GadgetArgs ex_gadget;
  std::size_t ex_trials = 400;
  ex_gadget.add_to(ex);
  ex->add_option("--trials", ex_trials);
  ex->callback([&] {
    s.load();
    trend_banner("stage exit times are comparable to l_i^2 s_i across stages");
    const auto g = ex_gadget.build(s.cfg.caps);
    ResultTable t("exit_times");
    for (int i = 1; i <= g.spec.u; ++i) {
      const auto st = exit_time_stats(g, i, ex_trials, sub_seed(s.cfg.seed, "exit", static_cast<std::uint64_t>(i)));
      for (const auto& x : st.starts)
        t.add_row({I(i), x.kind, I(x.vertex), I(ex_trials), x.mean, x.stderr_mean, x.q50, x.q99, x.max, st.scale,
                   x.mean / st.scale});
    }
    s.write(t, "exit_times.csv");
  });

  // biased-tree
  auto* bt = app.add_subcommand("biased-tree", "left-turn count at the last visit to level k");
  double bt_delta = 1.0;
  int bt_k = 12, bt_margin = 40;
  std::size_t bt_trials = 100000;
  bt->add_option("--delta", bt_delta);
  bt->add_option("--k", bt_k);
  bt->add_option("--margin", bt_margin, "truncation depth beyond level k");
  bt->add_option("--trials", bt_trials);
  bt->callback([&] {
    s.load();
    banner("VERIFIED in law", "g(Y_k) is Binomial(k, sqrt(1+delta)/(1+sqrt(1+delta)))");
    const auto counts = biased_level_statistic(bt_delta, bt_k, bt_trials, bt_margin, s.cfg.seed);
    const double p = biased_left_probability(bt_delta);
    std::vector<double> probs;
    ResultTable t("biased_tree");
    for (int j = 0; j <= bt_k; ++j) {
      probs.push_back(binomial_pmf(static_cast<unsigned>(j), static_cast<unsigned>(bt_k), p));
      t.add_row({bt_delta, I(bt_k), I(j), I(counts[static_cast<std::size_t>(j)]),
                 probs.back() * static_cast<double>(bt_trials)});
    }
    s.write(t, "biased_tree.csv");
    const auto chi = chi_square_gof(counts, probs);
    s.emit_json({{"chi_square", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}});
    if (chi.p_value <= 0.001) status = 1;
  });

  // time-in-clique
  auto* tc = app.add_subcommand("time-in-clique", "fraction of [0, T] spent in K, minimized over starts");
  GadgetArgs tc_gadget;
  double tc_horizon = 1000.0;
  std::size_t tc_trials = 50, tc_stride = 1;
  tc_gadget.add_to(tc);
  tc->add_option("--horizon", tc_horizon);
  tc->add_option("--trials", tc_trials);
  tc->add_option("--stride", tc_stride, "use every stride-th gadget vertex as a start");
  tc->callback([&] {
    s.load();
    trend_banner("every walker spends most of a long window inside the clique");
    const auto g = tc_gadget.build(s.cfg.caps);
    const auto rep = time_in_clique(g, tc_horizon, tc_trials, s.cfg.seed, tc_stride);
    ResultTable t("time_in_clique");
    for (std::size_t i = 0; i < rep.min_fraction.size(); ++i)
      t.add_row({I(s.cfg.seed), I(i), rep.horizon, rep.min_fraction[i]});
    s.write(t, "time_in_clique.csv");
    s.emit_json({{"fraction_above_two_thirds", rep.fraction_above}});
  });

  // interchange
  auto* ic = app.add_subcommand("interchange", "interchange process: simulation, coupling, exact TV, bounds");
  ic->require_subcommand(1);
  std::string ic_graph, ic_tb = "ct", ic_kernel = "reduced";
  GadgetArgs ic_gadget;
  std::size_t ic_trials = 200, ic_max_n = 5;
  double ic_horizon = 10.0, ic_q = 0.75, ic_conf = 0.99, ic_tmin = 0.01, ic_tmax = 10.0, ic_factor = 1.25;
  auto graph_for = [&]() -> std::pair<WeightedGraph, std::optional<GadgetGraph>> {
    if (!ic_graph.empty()) return {load_graph(ic_graph), std::nullopt};
    auto g = ic_gadget.build(s.cfg.caps);
    return {g.graph, g};
  };
  auto* ic_sim = ic->add_subcommand("sim", "run the process to a horizon and report swap counts");
  ic_sim->add_option("--graph", ic_graph);
  ic_gadget.add_to(ic_sim);
  ic_sim->add_option("--horizon", ic_horizon);
  ic_sim->add_option("--trials", ic_trials);
  ic_sim->callback([&] {
    s.load();
    const auto [g, gg] = graph_for();
    InterchangeOptions opt;
    opt.horizon = ic_horizon;
    ordered_json rows = ordered_json::array();
    const auto init = InterchangeState::identity(g.n());
    for (std::size_t i = 0; i < ic_trials; ++i) {
      const auto rec = simulate_interchange(g, init, opt, s.cfg.seed, i);
      rows.push_back({{"trial", i}, {"events", rec.events}, {"parity", permutation_parity(rec.final_state.sigma)}});
    }
    s.emit_json({{"horizon", ic_horizon}, {"trials", rows}});
  });
  auto* ic_couple = ic->add_subcommand("couple", "coalescence times of the coupling from (id, uniform)");
  ic_couple->add_option("--graph", ic_graph);
  ic_gadget.add_to(ic_couple);
  ic_couple->add_option("--trials", ic_trials);
  ic_couple->add_option("--kernel", ic_kernel)->check(CLI::IsMember({"reduced", "literal"}));
  ic_couple->add_option("--q", ic_q);
  ic_couple->add_option("--confidence", ic_conf);
  auto couple_cb = [&](bool summary) {
    s.load();
    const auto [g, gg] = graph_for();
    const auto mu =
        coupling_mix_upper(g, ic_trials, ic_q, s.cfg.seed, coupling_kernel_from_string(ic_kernel),
                           std::numeric_limits<double>::infinity(), ic_conf);
    ResultTable t("coupling");
    for (std::size_t i = 0; i < mu.times.size(); ++i)
      t.add_row({I(s.cfg.seed), I(i), I(std::isfinite(mu.times[i])), mu.times[i]});
    s.write(t, "coupling.csv");
    if (summary)
      s.emit_json({{"t_up", mu.t_up},
                   {"order", mu.order},
                   {"quantile", mu.quantile},
                   {"confidence", mu.confidence},
                   {"lower_bound", mu.lower_bound},
                   {"kernel", ic_kernel}});
    if (!std::isfinite(mu.t_up)) status = 1;
  };
  ic_couple->callback([&] { couple_cb(false); });
  auto* ic_up = ic->add_subcommand("mix-upper", "certified coupling upper bound on the mixing time");
  ic_up->add_option("--graph", ic_graph);
  ic_gadget.add_to(ic_up);
  ic_up->add_option("--trials", ic_trials);
  ic_up->add_option("--kernel", ic_kernel)->check(CLI::IsMember({"reduced", "literal"}));
  ic_up->add_option("--q", ic_q);
  ic_up->add_option("--confidence", ic_conf);
  ic_up->callback([&] { couple_cb(true); });
  auto* ic_tv = ic->add_subcommand("exact-tv", "exact TV distance to uniform on S_n from the identity");
  ic_tv->add_option("--graph", ic_graph)->required();
  ic_tv->add_option("--timebase", ic_tb, "lazy | ct")->check(CLI::IsMember({"lazy", "ct", "continuous"}));
  ic_tv->add_option("--t-min", ic_tmin);
  ic_tv->add_option("--t-max", ic_tmax);
  ic_tv->add_option("--factor", ic_factor, "geometric grid factor");
  ic_tv->add_option("--max-n", ic_max_n, "refuse graphs with more vertices (hard limit 8)");
  ic_tv->callback([&] {
    s.load();
    const auto g = load_graph(ic_graph);
    const Timebase tb = ic_tb == "lazy" ? Timebase::lazy : Timebase::continuous;
    const auto exi = build_exact_interchange(g, ic_max_n);
    auto grid = geometric_grid(ic_tmin, ic_tmax, ic_factor);
    if (tb == Timebase::lazy) {
      for (auto& t : grid) t = std::ceil(t);
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    const auto tv = exact_tv_curve(exi, tb, grid);
    ResultTable t("tv_curve");
    for (std::size_t i = 0; i < grid.size(); ++i)
      t.add_row({I(g.n()), std::string(to_string(tb)), grid[i], tv[i]});
    s.write(t, "tv_curve.csv");
    const auto tr = exact_timebase_ratio(exi);
    if (!tr.in_range)
      std::fprintf(stderr, "note: Lambda * t_mix(ct) / t_mix(lazy) = %g lies outside [1/10, 10]\n", tr.ratio);
    s.emit_json({{"mixing_time", exact_mixing_time(exi, tb)},
                 {"states", exi.states},
                 {"mix_lazy", tr.lazy},
                 {"mix_ct", tr.continuous},
                 {"total_rate", exi.total_rate},
                 {"timebase_ratio", tr.ratio}});
  });
  auto* ic_low = ic->add_subcommand("mix-lower", "TV lower bound from the root-particle-in-gadget event");
  ic_gadget.add_to(ic_low);
  ic_low->add_option("--trials", ic_trials);
  ic_low->add_option("--t-min", ic_tmin);
  ic_low->add_option("--t-max", ic_tmax);
  ic_low->add_option("--factor", ic_factor);
  ic_low->add_option("--confidence", ic_conf);
  ic_low->callback([&] {
    s.load();
    const auto g = ic_gadget.build(s.cfg.caps);
    const auto curve =
        root_event_lower_curve(g, geometric_grid(ic_tmin, ic_tmax, ic_factor), ic_trials, ic_conf, s.cfg.seed);
    ResultTable t("mix_lower");
    for (std::size_t i = 0; i < curve.times.size(); ++i)
      t.add_row({curve.times[i], I(curve.trials), I(curve.in_event[i]), curve.pi_event, curve.tv_lower[i]});
    s.write(t, "mix_lower.csv");
    s.emit_json({{"t_low", curve.t_low}, {"pi_event", curve.pi_event}});
  });

  // separation
  auto* sep = app.add_subcommand("separation", "mixing-time separation between G and its perturbation G'");
  sep->callback([&] {
    s.load();
    trend_banner("the perturbed graph mixes slower by a factor that grows with the stage count u");
    banner("VERIFIED per run", "the coupling time is a certified upper bound and the event bound a certified lower bound");
    const auto r = run_separation_experiment(s.cfg);
    s.write(r.table, "separation.csv");
    s.write(r.exits, "separation_exit.csv");
    s.write(r.lower, "mix_lower.csv");
    ordered_json j;
    j["complete"] = r.complete;
    if (!r.complete) {
      j["error"] = r.error;
      status = 1;
    }
    for (std::size_t i = 0; i < r.table.rows(); ++i)
      if (r.table.number(i, "t_low") > r.table.number(i, "t_up") && std::get<std::string>(r.table.row(i)[1]) == "G")
        status = 1;
    s.emit_json(j);
  });

  // weighted-sweep
  auto* sw = app.add_subcommand("weighted-sweep", "root-particle traversal as the left-edge bias delta grows");
  sw->callback([&] {
    s.load();
    trend_banner("biasing left edges should make deep bad leaves typical and slow the traversal");
    const auto t = run_weighted_sweep(s.cfg);
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (i == 0) first = t.number(i, "median_tk");
      last = t.number(i, "median_tk");
    }
    std::fprintf(stderr, "median T_K %s with delta (%g -> %g)\n", last >= first ? "grows" : "shrinks", first, last);
    s.write(t, "weighted_sweep.csv");
  });

  // verify
  auto* vf = app.add_subcommand("verify", "exact checks of the finite inequalities and identities");
  bool vf_corrupt = false;
  vf->add_flag("--corrupt-conductance", vf_corrupt, "negative control: perturb one weight in the split check");
  vf->callback([&] {
    s.load();
    banner("VERIFIED exactly", "electrical, Cheeger, exit-tail, comparison and L2 identities");
    auto vc = s.cfg.verify;
    vc.corrupt_conductance = vc.corrupt_conductance || vf_corrupt;
    const auto rep = run_verification_suite(vc, s.cfg.seed);
    s.write(rep.table(), "verification.csv");
    for (const auto& c : rep.checks) {
      std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.instances << " instances, worst "
                << format_double(c.worst) << ", " << format_double(std::round(c.seconds * 1000) / 1000) << " s)\n";
      if (!c.pass) std::cerr << "     first failure: " << c.detail << "\n";
    }
    if (!rep.pass()) status = 1;
  });

  // clock
  auto* ck = app.add_subcommand("clock", "clock auxiliary graph: uniform hitting, hitting times, p_even");
  ck->callback([&] {
    s.load();
    banner("VERIFIED exactly", "uniform hitting distribution of B from W");
    trend_banner("E_h[T_B] is of order |H|/2^m; p_even matches the first-step formula");
    const auto r = run_clock_experiment(s.cfg);
    s.write(r.table, "clock.csv");
    s.write(r.returns, "clock_returns.csv");
    for (const auto& f : r.failures) std::cerr << "FAIL " << f << "\n";
    if (!r.pass) status = 1;
  });

  // schema
  auto* sc = app.add_subcommand("schema", "list every CSV table with its columns and schema hash");
  sc->callback([&] {
    for (const auto& t : table_schemas()) {
      std::string cols;
      for (std::size_t i = 0; i < t.columns.size(); ++i) cols += (i ? "," : "") + t.columns[i];
      std::cout << t.name << " " << t.hash() << " " << cols << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return status;
}
