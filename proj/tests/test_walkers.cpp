#include <doctest.h>

#include "mixsens/parallel.hpp"
#include "mixsens/stats.hpp"
#include "mixsens/walkers.hpp"

using namespace mixsens;

TEST_CASE("continuous hitting time across a two-edge path") {
  // E_0[T_2] = 3: one unit holding at 0, then 1/2 at the middle plus a return with probability 1/2
  const auto c = derive_chain(build_basic(BasicShape::path, 2), Timebase::continuous);
  VertexMask stop{0, 0, 1};
  WalkOptions opt;
  opt.stop_set = &stop;
  const Walker w(c, opt);
  const auto t = run_trials<double>(20000, [&](std::size_t i) { return w.run(0, 11, i).hit_time; });
  const auto s = summarize(t);
  CHECK(std::abs(s.mean - 3.0) < 4 * s.stderr_mean());
}

TEST_CASE("lazy walk holds half the time") {
  const auto c = derive_chain(build_basic(BasicShape::complete, 3), Timebase::lazy);
  WalkOptions opt;
  opt.horizon = 10000;
  const auto tr = simulate_walk(c, 0, opt, 4);
  CHECK(tr.jumps == doctest::Approx(5000).epsilon(0.05));
}

TEST_CASE("lumped clique simulation has the same law") {
  GraphBuilder b(30);
  b.add_edge(0, 1);
  b.add_edge(1, 2);
  b.set_implicit_clique({2, 28});
  const auto g = std::move(b).build();
  const auto c = derive_chain(g, Timebase::continuous);
  VertexMask stop(30, 0);
  stop[0] = 1;
  WalkOptions lumped;
  lumped.stop_set = &stop;
  WalkOptions plain = lumped;
  plain.lump_clique = false;
  const Walker wl(c, lumped), wp(c, plain);
  CHECK(wl.lumped());
  CHECK(!wp.lumped());
  const auto a = run_trials<double>(4000, [&](std::size_t i) { return wl.run(20, 1, i).hit_time; });
  const auto z = run_trials<double>(4000, [&](std::size_t i) { return wp.run(20, 2, i).hit_time; });
  CHECK(ks_two_sample(a, z).p_value > 0.001);
}

TEST_CASE("walks are reproducible per trial") {
  const auto c = derive_chain(build_basic(BasicShape::cycle, 7), Timebase::continuous);
  WalkOptions opt;
  opt.horizon = 50;
  const auto a = simulate_walk(c, 0, opt, 9, 3), b = simulate_walk(c, 0, opt, 9, 3);
  CHECK(a.end_vertex == b.end_vertex);
  CHECK(a.jumps == b.jumps);
  VertexMask none(7, 0);
  opt.stop_set = &none;
  opt.timeout_is_error = true;
  CHECK_THROWS_AS(simulate_walk(c, 0, opt, 1), Error);
}

TEST_CASE("biased tree statistic") {
  CHECK(biased_left_probability(0.0) == 0.5);
  CHECK(biased_left_probability(3.0) == doctest::Approx(2.0 / 3.0));
  const auto counts = biased_level_statistic(0.0, 4, 2000, 20, 1);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  CHECK(counts.size() == 5);
  CHECK(total == 2000);
  CHECK_THROWS_AS(biased_level_statistic(0.0, 4, 10, 5, 1), Error);
}

TEST_CASE("gadget walkers") {
  const auto g = build_gadget(GadgetSpec::preset("desk", 2, 0.2));
  const auto ex = exit_time_stats(g, 1, 200, 3);
  CHECK(ex.starts.size() == 3);
  CHECK(ex.scale == 4.0 * 4.0 * 3.0 / 4.0);
  CHECK(ex.worst_mean > 0);
  const auto tr = root_particle_traversal(g, 200, 5);
  CHECK(tr.size() == 200);
  for (const auto& t : tr) CHECK(t.t_k > 0);
  const std::vector<double> times{0.5, 1e4};
  const auto counts = root_in_gadget_counts(g, times, 300, 2);
  CHECK(counts[0] == 300);
  CHECK(counts[1] < 150);
  const auto rep = time_in_clique(g, 2000.0, 5, 3, 4);
  CHECK(rep.min_fraction.size() == 5);
  for (double f : rep.min_fraction) CHECK((f >= 0 && f <= 1));
}
