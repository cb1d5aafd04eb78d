#include "mixsens/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <unordered_map>

#include "mixsens/rng.hpp"

namespace mixsens {

namespace {

double binom(unsigned n, unsigned k) {
  double r = 1.0;
  for (unsigned j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
  return r;
}

double bad_count(unsigned s, double threshold) {
  double c = 0.0;
  for (unsigned k = 0; k <= s; ++k)
    if (static_cast<double>(k) > threshold) c += binom(s, k);
  return c;
}

}  // namespace

GadgetSpec GadgetSpec::preset(const std::string& name, int u, double eps) {
  if (u < 1 || u > 12) throw Error("preset: u must be in [1, 12]");
  GadgetSpec s;
  s.u = u;
  s.eps = eps;
  s.schedule = name;
  for (int i = 1; i <= u; ++i) {
    if (name == "paper") {
      s.depths.push_back(static_cast<std::uint32_t>(std::pow(4.0, i - 1) * u));
      s.stretches.push_back(1u << (u + 1 - i));
    } else if (name == "mini") {
      s.depths.push_back(static_cast<std::uint32_t>((1u << (i - 1)) * static_cast<unsigned>(u)));
      s.stretches.push_back(1u << (u + 1 - i));
    } else if (name == "desk") {
      s.depths.push_back(3);
      s.stretches.push_back(1u << ((u + 2 - i) / 2));
    } else {
      throw Error("unknown schedule preset '" + name + "' (expected paper|mini|desk)");
    }
  }
  return s;
}

void GadgetSpec::validate() const {
  if (u < 1) throw Error("gadget: u must be >= 1");
  if (!(eps > 0.0 && eps < 0.5)) throw Error("gadget: eps must lie in (0, 1/2)");
  if (depths.size() != static_cast<std::size_t>(u) || stretches.size() != static_cast<std::size_t>(u))
    throw Error("gadget: schedules must have exactly u entries");
  for (auto s : depths)
    if (s < 1 || s > 40) throw Error("gadget: tree depths must lie in [1, 40]");
  for (auto l : stretches)
    if (l < 1) throw Error("gadget: stretch lengths must be >= 1");
  if (!clique_size && !(clique_mult > 0.0)) throw Error("gadget: clique multiplier must be positive");
}

SizeReport size_report(const GadgetSpec& spec) {
  spec.validate();
  SizeReport r{};
  double trees = 1.0, boundary = 0.0, gadget = 1.0;
  for (int i = 0; i < spec.u; ++i) {
    const unsigned s = spec.depths[static_cast<std::size_t>(i)];
    const double l = spec.stretches[static_cast<std::size_t>(i)];
    const double tree_edges = std::pow(2.0, s + 1) - 2.0;
    const double per_tree = tree_edges + tree_edges * (l - 1.0);  // all but the root
    const double bad = bad_count(s, spec.bad_threshold(i));
    r.stages.push_back({trees, bad, trees * per_tree});
    gadget += trees * per_tree;
    const double leaves = std::pow(2.0, s);
    boundary += trees * (i + 1 < spec.u ? leaves - bad : leaves);
    trees *= bad;
  }
  r.gadget = gadget;
  r.boundary = boundary;
  r.clique = spec.clique_size ? static_cast<double>(*spec.clique_size) : std::round(spec.clique_mult * gadget);
  r.total = gadget + r.clique - boundary;
  return r;
}

GadgetGraph build_gadget(const GadgetSpec& spec, std::optional<std::uint64_t> labeling_seed) {
  spec.validate();
  const SizeReport est = size_report(spec);
  if (est.total > static_cast<double>(spec.max_vertices))
    throw Error("gadget: " + format_double(est.total) + " vertices exceed the cap of " +
                std::to_string(spec.max_vertices));
  if (est.clique < est.boundary) throw Error("gadget: clique smaller than the set of fused leaves");

  struct Temp {
    std::int16_t stage, level, g;
    bool k_leaf;
  };
  std::vector<Temp> tv;
  std::vector<std::uint32_t> t_path_vertices;
  std::vector<StretchedPath> t_paths;
  const int u = spec.u;
  std::vector<std::vector<std::uint32_t>> roots(u), leaves(u), bad(u), stage_sets(u);
  std::optional<Rng> rng;
  if (labeling_seed) rng.emplace(*labeling_seed, 0x1ab31u);

  tv.push_back({0, 0, 0, false});
  roots[0].push_back(0);
  for (int i = 0; i < u; ++i) {
    const unsigned s = spec.depths[static_cast<std::size_t>(i)];
    const std::uint32_t l = spec.stretches[static_cast<std::size_t>(i)];
    const double thr = spec.bad_threshold(i);
    for (std::uint32_t r : roots[static_cast<std::size_t>(i)]) {
      stage_sets[i].push_back(r);
      std::vector<std::uint32_t> frontier{r}, gs{0}, next, next_g;
      for (unsigned d = 0; d < s; ++d) {
        next.clear();
        next_g.clear();
        for (std::size_t f = 0; f < frontier.size(); ++f) {
          const bool flip = rng && rng->coin();
          for (int c = 0; c < 2; ++c) {
            const bool is_left = (c == 0) != flip;
            const auto offset = static_cast<std::uint32_t>(t_path_vertices.size());
            t_path_vertices.push_back(frontier[f]);
            for (std::uint32_t j = 1; j < l; ++j) {
              t_path_vertices.push_back(static_cast<std::uint32_t>(tv.size()));
              stage_sets[i].push_back(static_cast<std::uint32_t>(tv.size()));
              tv.push_back({static_cast<std::int16_t>(i), -1, -1, false});
            }
            const auto child = static_cast<std::uint32_t>(tv.size());
            const auto g = static_cast<std::int16_t>(gs[f] + (is_left ? 1 : 0));
            tv.push_back({static_cast<std::int16_t>(i), static_cast<std::int16_t>(d + 1), g, false});
            stage_sets[i].push_back(child);
            t_path_vertices.push_back(child);
            t_paths.push_back({is_left ? EdgeKind::left : EdgeKind::right, i, static_cast<int>(d + 1), offset, l});
            next.push_back(child);
            next_g.push_back(static_cast<std::uint32_t>(g));
          }
        }
        std::swap(frontier, next);
        std::swap(gs, next_g);
      }
      for (std::size_t f = 0; f < frontier.size(); ++f) {
        const std::uint32_t leaf = frontier[f];
        leaves[i].push_back(leaf);
        const bool is_bad = static_cast<double>(gs[f]) > thr;
        if (is_bad) bad[i].push_back(leaf);
        if (is_bad && i + 1 < u) roots[static_cast<std::size_t>(i) + 1].push_back(leaf);
        else tv[leaf].k_leaf = true;
      }
    }
    if (i + 1 < u && roots[static_cast<std::size_t>(i) + 1].empty())
      throw Error("gadget: stage " + std::to_string(i + 1) +
                  " has no bad leaves, the construction degenerates (lower eps or raise the depth)");
  }

  // relabel: non-K, then fused leaves, then interior K
  const std::size_t t_n = tv.size();
  std::vector<Vertex> id(t_n);
  Vertex next_id = 0;
  for (std::size_t t = 0; t < t_n; ++t)
    if (!tv[t].k_leaf) id[t] = next_id++;
  const Vertex k_first = next_id;
  for (std::size_t t = 0; t < t_n; ++t)
    if (tv[t].k_leaf) id[t] = next_id++;
  const std::size_t boundary = next_id - k_first;
  const std::size_t k_size = static_cast<std::size_t>(est.clique);
  const std::size_t n = k_first + k_size;

  GadgetGraph out;
  out.spec = spec;
  out.labeling_seed = labeling_seed;
  out.k_first = k_first;
  out.k_boundary = boundary;
  out.k_size = k_size;
  out.root = id[0];
  out.stage_of.assign(n, -1);
  out.level_of.assign(n, -1);
  out.g_of.assign(n, -1);
  for (std::size_t t = 0; t < t_n; ++t) {
    out.stage_of[id[t]] = tv[t].stage;
    out.level_of[id[t]] = tv[t].level;
    out.g_of[id[t]] = tv[t].g;
  }
  out.level_of[out.root] = 0;
  out.g_of[out.root] = 0;
  auto map_set = [&](const std::vector<std::uint32_t>& src) {
    std::vector<Vertex> v(src.size());
    for (std::size_t j = 0; j < src.size(); ++j) v[j] = id[src[j]];
    return v;
  };
  for (int i = 0; i < u; ++i) {
    out.stages.push_back(map_set(stage_sets[i]));
    std::sort(out.stages.back().begin(), out.stages.back().end());
    out.roots.push_back(map_set(roots[i]));
    out.leaves.push_back(map_set(leaves[i]));
    out.bad_leaves.push_back(map_set(bad[i]));
  }

  GraphBuilder b(n);
  out.path_vertices.reserve(t_path_vertices.size());
  for (auto t : t_path_vertices) out.path_vertices.push_back(id[t]);
  out.paths = t_paths;
  for (const auto& p : out.paths) {
    const auto verts = out.path(p);
    for (std::uint32_t j = 0; j < p.length; ++j)
      b.add_edge(verts[j], verts[j + 1], 1.0, EdgeTag{p.kind, p.stage, p.level});
  }
  b.set_implicit_clique({k_first, static_cast<Vertex>(k_size)});
  out.graph = std::move(b).build();
  return out;
}

GadgetGraph perturb_bridges(const GadgetGraph& g) {
  GraphBuilder b(g.n());
  for (EdgeId e = 0; e < g.graph.num_explicit_edges(); ++e) {
    const auto& ed = g.graph.edge(e);
    b.add_edge(ed.u, ed.v, ed.w, g.graph.tag(e));
  }
  for (const auto& p : g.paths) {
    if (p.kind != EdgeKind::left) continue;
    if (p.length % 2 != 0)
      throw Error("bridges: left path of odd length " + std::to_string(p.length) + " in stage " +
                  std::to_string(p.stage + 1));
    const auto verts = g.path(p);
    for (std::uint32_t j = 0; j + 2 <= p.length; j += 2)
      b.add_edge(verts[j], verts[j + 2], 1.0, EdgeTag{EdgeKind::bridge, p.stage, p.level});
  }
  b.set_implicit_clique(g.graph.implicit_clique());
  GadgetGraph out = g;
  out.graph = std::move(b).build();
  out.bridged = true;
  return out;
}

GadgetGraph perturb_weights(const GadgetGraph& g, double delta) {
  if (!(delta >= 0.0)) throw Error("weights: delta must be >= 0");
  std::vector<double> w(g.graph.num_explicit_edges());
  for (EdgeId e = 0; e < w.size(); ++e)
    w[e] = g.graph.tag(e).kind == EdgeKind::left ? 1.0 + delta : g.graph.edge(e).w;
  GadgetGraph out = g;
  out.graph = g.graph.with_weights(w);
  out.delta = delta;
  return out;
}

std::vector<std::vector<Vertex>> recompute_bad_leaves(const GadgetGraph& g) {
  // children lists from the graph itself: a branch vertex's children are the
  // branch vertices one level down reached along unit paths inside its stage
  std::vector<std::vector<Vertex>> out(static_cast<std::size_t>(g.spec.u));
  for (int i = 0; i < g.spec.u; ++i) {
    const auto s = static_cast<int>(g.spec.depths[static_cast<std::size_t>(i)]);
    const double thr = g.spec.bad_threshold(i);
    struct Item {
      Vertex v;
      int level;
      int lefts;
    };
    for (Vertex r : g.roots[static_cast<std::size_t>(i)]) {
      std::vector<Item> stack{{r, 0, 0}};
      while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        if (it.level == s) {
          if (static_cast<double>(it.lefts) > thr) out[static_cast<std::size_t>(i)].push_back(it.v);
          continue;
        }
        for (const auto& inc : g.graph.adjacency(it.v)) {
          const auto& tag = g.graph.tag(inc.edge);
          if (tag.stage != i || tag.level != it.level + 1) continue;
          if (tag.kind != EdgeKind::left && tag.kind != EdgeKind::right) continue;
          // follow the path down to the next branch vertex
          Vertex prev = it.v, cur = inc.to;
          while (g.level_of[cur] < 0) {
            Vertex nxt = cur;
            for (const auto& in2 : g.graph.adjacency(cur)) {
              const auto& t2 = g.graph.tag(in2.edge);
              if (in2.to != prev && t2.stage == i && t2.level == tag.level &&
                  (t2.kind == EdgeKind::left || t2.kind == EdgeKind::right)) {
                nxt = in2.to;
                break;
              }
            }
            if (nxt == cur) throw Error("recompute_bad_leaves: broken stretched path");
            prev = cur;
            cur = nxt;
          }
          stack.push_back({cur, it.level + 1, it.lefts + (tag.kind == EdgeKind::left ? 1 : 0)});
        }
      }
    }
    std::sort(out[static_cast<std::size_t>(i)].begin(), out[static_cast<std::size_t>(i)].end());
  }
  return out;
}

std::string spec_to_json(const GadgetSpec& s) {
  nlohmann::ordered_json j;
  j["u"] = s.u;
  j["eps"] = s.eps;
  j["schedule"] = s.schedule;
  j["depths"] = s.depths;
  j["stretches"] = s.stretches;
  if (s.clique_size) j["clique_size"] = *s.clique_size;
  j["clique_mult"] = s.clique_mult;
  j["max_vertices"] = s.max_vertices;
  return j.dump();
}

namespace {

GadgetSpec spec_from(const nlohmann::json& j) {
  GadgetSpec s;
  s.u = j.at("u").get<int>();
  s.eps = j.at("eps").get<double>();
  s.schedule = j.value("schedule", std::string("custom"));
  s.depths = j.at("depths").get<std::vector<std::uint32_t>>();
  s.stretches = j.at("stretches").get<std::vector<std::uint32_t>>();
  if (j.contains("clique_size")) s.clique_size = j.at("clique_size").get<std::size_t>();
  s.clique_mult = j.value("clique_mult", 4.0);
  s.max_vertices = j.value("max_vertices", std::size_t{20'000'000});
  return s;
}

}  // namespace

GadgetSpec spec_from_json(const std::string& text) { return spec_from(nlohmann::json::parse(text)); }

std::string gadget_to_json(const GadgetGraph& g, bool include_sets) {
  nlohmann::ordered_json j;
  j["spec"] = nlohmann::json::parse(spec_to_json(g.spec));
  if (g.labeling_seed) j["labeling_seed"] = *g.labeling_seed;
  else j["labeling_seed"] = nullptr;
  j["bridged"] = g.bridged;
  j["delta"] = g.delta;
  j["n"] = g.n();
  j["root"] = g.root;
  j["gadget_size"] = g.gadget_size();
  j["K"] = {{"first", g.k_first}, {"size", g.k_size}, {"boundary", g.k_boundary}};
  auto sizes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < g.stages.size(); ++i)
    sizes.push_back({{"stage", i + 1}, {"vertices", g.stages[i].size()}, {"roots", g.roots[i].size()},
                     {"leaves", g.leaves[i].size()}, {"bad_leaves", g.bad_leaves[i].size()}});
  j["stages"] = sizes;
  if (include_sets) {
    j["H"] = g.stages;
    j["B"] = g.bad_leaves;
  }
  return j.dump(1);
}

GadgetGraph gadget_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::optional<std::uint64_t> seed;
  if (j.contains("labeling_seed") && !j["labeling_seed"].is_null()) seed = j["labeling_seed"].get<std::uint64_t>();
  GadgetGraph g = build_gadget(spec_from(j.at("spec")), seed);
  if (j.value("bridged", false)) g = perturb_bridges(g);
  const double delta = j.value("delta", 0.0);
  if (delta != 0.0) g = perturb_weights(g, delta);
  return g;
}

}  // namespace mixsens
