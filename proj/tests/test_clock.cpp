#include <doctest.h>

#include "mixsens/clock_graph.hpp"

using namespace mixsens;

TEST_CASE("clock auxiliary graph shape for m = 1") {
  const auto h = build_clock_aux(1);
  CHECK(h.n() == 2046);
  CHECK(h.B.size() == 2);
  CHECK(h.W.size() == 1024);
  CHECK(h.A.size() == 2);
  CHECK(h.graph.is_connected());
  std::vector<int> deg_by_kind(7, 0);
  for (Vertex x = 0; x < h.n(); ++x) {
    const auto d = h.graph.adjacency(x).size();
    if (h.layer[x] == 5) CHECK(d == 2);
    else if (h.layer[x] > 0) CHECK(d == 6);
    else if (h.depth[x] == 0) CHECK(d == 2);
    else if (h.depth[x] == 4) CHECK(d == 5);
    else CHECK(d == 3);
  }
}

TEST_CASE("p_even formula") {
  CHECK(p_even_formula(0.5, 0.0) == doctest::Approx(2.0 / 3.0));
  CHECK(p_even_formula(0.5, 0.5) == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("product chain swaps only at A") {
  const auto h = build_clock_aux(1);
  Rng rng(2);
  ProductState st{h.W.front(), {0, 1, 2}};
  for (int i = 0; i < 50; ++i) CHECK(!product_chain_step(h, st, rng));
  ProductState at_a{h.A.front(), {0, 1, 2}};
  int swaps = 0;
  for (int i = 0; i < 2000; ++i) {
    ProductState s = at_a;
    swaps += product_chain_step(h, s, rng, 1.0);
  }
  CHECK(swaps == doctest::Approx(1000).epsilon(0.1));
}

TEST_CASE("hitting quantities") {
  const auto h = build_clock_aux(1);
  const double p = return_probability(h, h.A.front());
  CHECK(p > 0);
  CHECK(p < 1);
  const std::vector<Vertex> starts{h.W.front()};
  const auto exact = exact_hitting_times_to_B(h, starts);
  const auto mc = sampled_hitting_times_to_B(h, starts, 400, 3);
  CHECK(std::abs(mc[0].mean - exact[0]) < 4 * mc[0].stderr_mean());
}

TEST_CASE("clock caps") {
  CHECK_THROWS_AS(build_clock_aux(2, std::nullopt, 1000), Error);
  CHECK_THROWS_AS(build_clock_aux(0), Error);
  CHECK_THROWS_AS(build_clock_aux(1, build_basic(BasicShape::path, 3)), Error);
}
