#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixsens/spectral.hpp"
#include "mixsens/verification.hpp"

using namespace mixsens;

TEST_CASE("complete graph spectrum") {
  const auto k5 = build_basic(BasicShape::complete, 5);
  const auto ct = spectrum(derive_chain(k5, Timebase::continuous));
  CHECK(std::abs(ct.eigenvalues[0]) < 1e-12);
  for (std::size_t i = 1; i < 5; ++i) CHECK(ct.eigenvalues[i] == doctest::Approx(5.0));
  // lazy: I - P has eigenvalue (1 + 1/4)/2 with multiplicity 4
  const auto lz = spectrum(derive_chain(k5, Timebase::lazy));
  CHECK(lz.gap == doctest::Approx(0.625));
}

TEST_CASE("Cheeger constant of a short path") {
  const auto c = derive_chain(build_basic(BasicShape::path, 2), Timebase::continuous);
  const auto ch = cheeger(c);
  CHECK(ch.phi == doctest::Approx(1.0));
  CHECK(ch.set.size() == 1);
}

TEST_CASE("average L2 mixing of one edge") {
  const auto c = derive_chain(build_basic(BasicShape::path, 1), Timebase::continuous);
  const auto a = avg_l2_mixing(c);
  CHECK(a.time == doctest::Approx(std::numbers::ln2 / 2).epsilon(1e-8));
  CHECK(a.trace_residual < 1e-10);
}

TEST_CASE("Dirichlet comparison") {
  Rng rng(5);
  const auto g = random_weighted_graph(6, rng);
  const auto a = derive_chain(g, Timebase::lazy);
  CHECK(dirichlet_compare(a, a).c == doctest::Approx(1.0));
  std::vector<double> w;
  for (const auto& e : g.edges()) w.push_back(2 * e.w);
  // doubling every weight leaves the lazy chain unchanged
  CHECK(dirichlet_compare(a, derive_chain(g.with_weights(w), Timebase::lazy)).c == doctest::Approx(1.0));
  const auto other = derive_chain(build_basic(BasicShape::complete, 6), Timebase::lazy);
  const auto cert = dirichlet_compare(derive_chain(build_basic(BasicShape::path, 5), Timebase::lazy), other);
  CHECK(cert.c == 0.0);
  CHECK(cert.diagnostic.find("edge sets differ") != std::string::npos);
}

TEST_CASE("restricted spectrum and exit tail") {
  Rng rng(8);
  const auto c = derive_chain(random_weighted_graph(8, rng), Timebase::continuous);
  const std::vector<Vertex> a{1, 3};
  const auto r = restricted(c, a);
  CHECK(r.lambda > 0);
  CHECK(r.phi * r.phi / (4 * r.max_diag) <= r.lambda + 1e-12);
  CHECK(r.lambda <= r.phi + 1e-12);
  const auto e0 = exit_tail_check(c, a, 0.0);
  CHECK(e0.lhs == doctest::Approx(1.0));
  const std::vector<Vertex> whole{0, 1, 2, 3, 4, 5, 6, 7};
  CHECK_THROWS_AS(restricted(c, whole), Error);
}

TEST_CASE("L2 versus uniform mixing") {
  const auto c = derive_chain(build_basic(BasicShape::cycle, 6), Timebase::lazy);
  const auto l = l2_uniform_mixing(c);
  CHECK(l.sandwich);
  CHECK(l.mix2 <= l.mixunif);
  CHECK(l.diag_residual < 1e-10);
}

TEST_CASE("verification suite passes and the negative control trips") {
  VerifyConfig cfg;
  cfg.cheeger_graphs = 30;
  cfg.split_graphs = 20;
  cfg.compare_pairs = 20;
  CHECK(run_verification_suite(cfg, 1).pass());
  cfg.corrupt_conductance = true;
  const auto bad = check_conductance_split(cfg, 1);
  CHECK(!bad.pass);
  CHECK(bad.detail.find("reproduce") != std::string::npos);
}
