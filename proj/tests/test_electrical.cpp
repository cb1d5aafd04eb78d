#include <doctest.h>

#include <cmath>

#include "mixsens/electrical.hpp"
#include "mixsens/verification.hpp"

using namespace mixsens;

TEST_CASE("series and parallel resistances") {
  GraphBuilder b(3);
  b.add_edge(0, 1, 2.0);  // resistance 1/2
  b.add_edge(1, 2, 0.25);  // resistance 4
  b.add_edge(0, 2, 1.0 / 4.5);
  const auto g = std::move(b).build();
  // (1/2 + 4) in parallel with 4.5
  CHECK(effective_resistance(g, 0, 2).value == doctest::Approx(2.25).epsilon(1e-12));
}

TEST_CASE("large systems switch to conjugate gradient") {
  const auto p = build_basic(BasicShape::path, 4000);
  const auto r = effective_resistance(p, 0, 4000);
  CHECK(r.method == "cg-jacobi");
  CHECK(r.value == doctest::Approx(4000.0).epsilon(1e-9));
  CHECK(r.residual < 1e-8);
}

TEST_CASE("star split is proportional to the weights") {
  const std::vector<double> w{1.0, 2.0, 5.0};
  const auto g = build_star(w);
  const std::vector<Vertex> t{1, 2, 3};
  const auto s = hitting_split(g, 0, t);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s.absorption[i] == doctest::Approx(w[i] / 8.0).epsilon(1e-12));
  CHECK(s.max_difference < 1e-12);
  const std::vector<Vertex> same{1, 1};
  CHECK_THROWS_AS(hitting_split(g, 0, same), Error);
}

TEST_CASE("harmonic measures form a distribution") {
  Rng rng(3);
  const auto g = random_weighted_graph(10, rng);
  const std::vector<Vertex> bnd{0, 4, 9};
  const auto h = harmonic_measures(g, bnd);
  for (Vertex x = 0; x < 10; ++x) CHECK(h[0][x] + h[1][x] + h[2][x] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h[1][4] == 1.0);
}

TEST_CASE("series-parallel reduction keeps resistances") {
  const auto g = bridged_path(4);
  const std::vector<Vertex> keep{0, 8};
  const auto r = reduce_series_parallel(g, keep);
  CHECK(r.n() == 2);
  CHECK(1.0 / r.edge(0).w == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  const auto k4 = build_basic(BasicShape::complete, 4);
  const std::vector<Vertex> k{0, 1};
  CHECK_THROWS_WITH_AS(reduce_series_parallel(k4, k), doctest::Contains("degree"), Error);
}

TEST_CASE("stretched tree at unit stretch") {
  const std::vector<double> ones(20, 1.0);
  for (int h = 1; h < 20; ++h) {
    const double exact = (std::ldexp(1.0, -h) - std::ldexp(1.0, -20)) / (1 - std::ldexp(1.0, -20));
    CHECK(stretched_tree_root_hit(ones, h, 20) == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(stretched_tree_root_hit(ones, 0, 20) == 1.0);
  const std::vector<double> rising{1, 2, 3};
  CHECK_THROWS_AS(stretched_tree_root_hit(rising, 1, 3), Error);
}
