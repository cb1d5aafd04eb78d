#include <doctest.h>

#include <algorithm>

#include "mixsens/gadget.hpp"

using namespace mixsens;

namespace {

std::vector<std::vector<Vertex>> sorted(std::vector<std::vector<Vertex>> v) {
  for (auto& x : v) std::sort(x.begin(), x.end());
  return v;
}

}  // namespace

TEST_CASE("presets follow their schedules") {
  const auto p = GadgetSpec::preset("paper", 3, 0.2);
  CHECK(p.depths == std::vector<std::uint32_t>{3, 12, 48});
  CHECK(p.stretches == std::vector<std::uint32_t>{8, 4, 2});
  const auto m = GadgetSpec::preset("mini", 3, 0.2);
  CHECK(m.depths == std::vector<std::uint32_t>{3, 6, 12});
  const auto d = GadgetSpec::preset("desk", 4, 0.2);
  CHECK(d.depths == std::vector<std::uint32_t>{3, 3, 3, 3});
  CHECK(d.stretches == std::vector<std::uint32_t>{4, 4, 2, 2});
  CHECK_THROWS_AS(GadgetSpec::preset("huge", 2, 0.2), Error);
}

TEST_CASE("desk gadget structure") {
  const auto g = build_gadget(GadgetSpec::preset("desk", 3, 0.2));
  const auto r = size_report(g.spec);
  CHECK(g.n() == static_cast<std::size_t>(r.total));
  CHECK(g.gadget_size() == static_cast<std::size_t>(r.gadget));
  CHECK(g.graph.is_connected());
  CHECK(g.stages.size() == 3);
  CHECK(g.roots[1].size() == g.bad_leaves[0].size());
  CHECK(sorted(recompute_bad_leaves(g)) == sorted(g.bad_leaves));
  // every bad leaf has more than (1/2 + eps) s left turns
  for (int i = 0; i < 3; ++i)
    for (Vertex b : g.bad_leaves[static_cast<std::size_t>(i)]) CHECK(g.g_of[b] > g.spec.bad_threshold(i));
  // root of H_1 is not in K, the last stage's leaves all are
  CHECK(!g.in_K(g.root));
  for (Vertex l : g.leaves[2]) CHECK(g.in_K(l));
  for (const auto& p : g.paths) CHECK(g.path(p).size() == p.length + 1u);
}

TEST_CASE("gadget JSON round trip rebuilds the same graph") {
  const auto g = build_gadget(GadgetSpec::preset("desk", 2, 0.2), 99);
  const auto back = gadget_from_json(gadget_to_json(g));
  CHECK(back.graph == g.graph);
  CHECK(back.bad_leaves == g.bad_leaves);
  const auto bridged = perturb_bridges(g);
  CHECK(gadget_from_json(gadget_to_json(bridged)).graph == bridged.graph);
}

TEST_CASE("perturbations") {
  const auto g = build_gadget(GadgetSpec::preset("desk", 2, 0.2));
  const auto b = perturb_bridges(g);
  std::size_t bridges = 0;
  for (EdgeId e = 0; e < b.graph.num_explicit_edges(); ++e) bridges += b.graph.tag(e).kind == EdgeKind::bridge;
  CHECK(bridges > 0);
  CHECK(b.n() == g.n());
  const auto w = perturb_weights(g, 0.5);
  for (EdgeId e = 0; e < w.graph.num_explicit_edges(); ++e)
    CHECK(w.graph.edge(e).w == (w.graph.tag(e).kind == EdgeKind::left ? 1.5 : 1.0));
  CHECK_THROWS_AS(perturb_weights(g, -1.0), Error);
}

TEST_CASE("vertex cap is enforced before building") {
  auto spec = GadgetSpec::preset("paper", 3, 0.2);
  spec.max_vertices = 1000;
  CHECK_THROWS_AS(build_gadget(spec), Error);
}
