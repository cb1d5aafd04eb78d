#include <doctest.h>

#include "mixsens/graph.hpp"

using namespace mixsens;

TEST_CASE("builder merges parallel edges and rejects bad input") {
  GraphBuilder b(3);
  const auto e = b.add_edge(0, 1, 1.0, EdgeTag{EdgeKind::left});
  CHECK(b.add_edge(1, 0, 2.0, EdgeTag{EdgeKind::bridge}) == e);
  CHECK_THROWS_AS(b.add_edge(2, 2), Error);
  CHECK_THROWS_AS(b.add_edge(0, 2, 0.0), Error);
  CHECK_THROWS_AS(b.add_edge(0, 5), Error);
  const auto g = std::move(b).build();
  CHECK(g.num_explicit_edges() == 1);
  CHECK(g.edge(0).w == 3.0);
  CHECK(g.tag(0).kind == EdgeKind::left);
  CHECK(!g.is_connected());
}

TEST_CASE("implicit clique degrees and materialization") {
  GraphBuilder b(6);
  b.add_edge(0, 1, 2.0);
  b.add_edge(1, 2);
  b.set_implicit_clique({2, 4});
  const auto g = std::move(b).build();
  CHECK(g.num_edges() == 2 + 6);
  CHECK(g.weighted_degree(2) == 1.0 + 3.0);
  CHECK(g.weighted_degree(5) == 3.0);
  CHECK(g.weight_between(3, 5) == 1.0);
  CHECK(g.is_connected());
  const auto m = g.materialized();
  CHECK(m.num_explicit_edges() == 8);
  CHECK(m.total_weight() == doctest::Approx(g.total_weight()));
}

TEST_CASE("text format round trip is exact") {
  GraphBuilder b(4);
  b.add_edge(0, 1, 0.1, EdgeTag{EdgeKind::left, 1, 2});
  b.add_edge(1, 2, 1.0 / 3.0, EdgeTag{EdgeKind::right, 0, -1});
  b.add_edge(2, 3, 1e-17, EdgeTag{EdgeKind::bridge});
  const auto g = std::move(b).build();
  const auto back = graph_from_text(to_graph_text(g));
  CHECK(back == g);
  CHECK_THROWS_AS(graph_from_text("n 2\n0 1 abc plain\n"), Error);
  CHECK_THROWS_AS(graph_from_text("0 1 1 plain\n"), Error);
  CHECK_THROWS_WITH_AS(graph_from_text("n 2\n\n0 1 1 sideways\n"), doctest::Contains("sideways"), Error);
}

TEST_CASE("basic shapes and stretching") {
  CHECK(build_basic(BasicShape::path, 4).n() == 5);
  CHECK(build_basic(BasicShape::complete, 5).num_explicit_edges() == 10);
  const auto t = build_basic(BasicShape::binary_tree, 3);
  CHECK(t.n() == 15);
  CHECK(t.tag(0).kind == EdgeKind::left);
  const auto s = stretch_edges(build_basic(BasicShape::path, 2), 3);
  CHECK(s.n() == 3 + 4);
  CHECK(s.num_explicit_edges() == 6);
  CHECK(s.is_connected());
}

TEST_CASE("shortest round-trip doubles") {
  for (double x : {0.1, 1.0 / 3.0, 1e300, 5e-324, -2.5}) CHECK(parse_double(format_double(x)) == x);
  CHECK_THROWS_AS(parse_double("1.0x"), Error);
}
