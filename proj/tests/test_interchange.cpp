#include <doctest.h>

#include <cmath>

#include "mixsens/interchange.hpp"
#include "mixsens/stats.hpp"

using namespace mixsens;

TEST_CASE("permutation ranking is a bijection") {
  std::vector<char> seen(120, 0);
  for (std::uint32_t r = 0; r < 120; ++r) {
    const auto p = unrank_permutation(r, 5);
    CHECK(is_permutation(p));
    CHECK(rank_permutation(p) == r);
    seen[r] = 1;
  }
  CHECK(rank_permutation(std::vector<std::uint32_t>{0, 1, 2, 3, 4}) == 0);
  CHECK(permutation_parity(std::vector<std::uint32_t>{1, 0, 2}) == 1);
  CHECK(permutation_parity(std::vector<std::uint32_t>{1, 2, 0}) == 0);
}

TEST_CASE("interchange simulation keeps a consistent state") {
  const auto g = build_basic(BasicShape::cycle, 5);
  InterchangeOptions opt;
  opt.horizon = 20;
  opt.check_invariants = true;
  const auto r = simulate_interchange(g, InterchangeState::identity(5), opt, 3);
  CHECK(r.final_state.consistent());
  CHECK(r.events > 0);
}

TEST_CASE("edge clock picks edges in proportion to weight") {
  GraphBuilder b(4);
  b.add_edge(0, 1, 1.0);
  b.add_edge(1, 2, 3.0);
  b.set_implicit_clique({2, 2});
  const auto g = std::move(b).build();
  const EdgeClock clock(g);
  CHECK(clock.total_rate() == 5.0);
  Rng rng(1);
  std::vector<std::uint64_t> counts(3, 0);
  for (int i = 0; i < 50000; ++i) {
    const auto r = clock.sample(rng);
    ++counts[r.edge == kCliqueEdge ? 2 : r.edge];
  }
  const std::vector<double> p{0.2, 0.6, 0.2};
  CHECK(chi_square_gof(counts, p).p_value > 0.001);
}

TEST_CASE("literal and reduced couplings agree in law") {
  GraphBuilder b(12);
  b.add_edge(0, 1);
  b.add_edge(1, 2, 2.0);
  b.add_edge(2, 3);
  b.add_edge(0, 3);
  b.set_implicit_clique({3, 9});
  const auto g = std::move(b).build();
  const auto lit = coupling_mix_upper(g, 2000, 0.75, 5, CouplingKernel::literal);
  const auto red = coupling_mix_upper(g, 2000, 0.75, 6, CouplingKernel::reduced);
  CHECK(ks_two_sample(lit.times, red.times).p_value > 0.001);
  CHECK(std::isfinite(lit.t_up));
}

TEST_CASE("exact TV for a single edge, both timebases") {
  const auto ex = build_exact_interchange(build_basic(BasicShape::path, 1));
  CHECK(ex.states == 2);
  const std::vector<double> ts{0.0, 0.3, 1.0};
  const auto tv = exact_tv_curve(ex, Timebase::continuous, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(tv[i] == doctest::Approx(std::exp(-2 * ts[i]) / 2));
  // the lazy chain mixes completely after one step
  const std::vector<double> steps{0, 1, 2};
  const auto lz = exact_tv_curve(ex, Timebase::lazy, steps);
  CHECK(lz[0] == 0.5);
  CHECK(lz[1] == doctest::Approx(0.0));
  CHECK(exact_mixing_time(ex, Timebase::lazy) == 1.0);
}

TEST_CASE("exact and serial kernels agree") {
  const auto ex = build_exact_interchange(build_basic(BasicShape::complete, 5));
  std::vector<double> in(ex.states, 0.0), a(ex.states), b(ex.states);
  in[7] = 1.0;
  exact_apply(ex, in, a, true);
  exact_apply(ex, in, b, false);
  CHECK(a == b);
  CHECK_THROWS_AS(build_exact_interchange(build_basic(BasicShape::complete, 9), 9), Error);
}

TEST_CASE("event lower bound") {
  CHECK(tv_lower_from_event(0, 100, 0.5) == 0.0);
  const double lb = tv_lower_from_event(1000, 1000, 0.2);
  CHECK(lb > 0.7);
  CHECK(lb < 0.8);
}

TEST_CASE("lazy and continuous mixing times agree up to the total rate") {
  // single edge: lazy mixes in one step, continuous TV is exp(-2t)/2
  const auto one = exact_timebase_ratio(build_exact_interchange(build_basic(BasicShape::path, 1)));
  CHECK(one.lazy == 1.0);
  CHECK(one.continuous == doctest::Approx(std::log(2.0) / 2).epsilon(1e-8));
  CHECK(one.ratio == doctest::Approx(std::log(2.0) / 2).epsilon(1e-8));
  for (const auto& g : {build_basic(BasicShape::path, 3), build_basic(BasicShape::cycle, 4),
                        build_basic(BasicShape::complete, 5)}) {
    const auto r = exact_timebase_ratio(build_exact_interchange(g));
    CHECK(r.in_range);
  }
}
