#include <chrono>
#include <cstdio>

#include "mixsens/gadget.hpp"
#include "mixsens/interchange.hpp"
#include "mixsens/parallel.hpp"

using namespace mixsens;

namespace {

template <class Fn>
double time_it(int reps, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", max_threads());

  const auto k7 = build_basic(BasicShape::complete, 7);
  const auto ex = build_exact_interchange(k7, 7);
  std::vector<double> in(ex.states, 1.0 / static_cast<double>(ex.states)), out(ex.states);
  in[0] += 1e-3;
  const double serial = time_it(20, [&] { exact_apply(ex, in, out, false); });
  const double para = time_it(20, [&] { exact_apply(ex, in, out, true); });
  std::vector<double> out2(ex.states);
  exact_apply(ex, in, out2, false);
  double diff = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) diff = std::max(diff, std::abs(out[i] - out2[i]));
  std::printf("exact_apply K7 (%zu states): serial %.3f ms, openmp %.3f ms, max diff %.3g\n", ex.states,
              serial * 1e3, para * 1e3, diff);

  const auto g = build_gadget(GadgetSpec::preset("desk", 2, 0.2));
  const double lit = time_it(1, [&] { coupling_mix_upper(g.graph, 20, 0.75, 7, CouplingKernel::literal); });
  const double red = time_it(1, [&] { coupling_mix_upper(g.graph, 20, 0.75, 7, CouplingKernel::reduced); });
  std::printf("coupling desk u=2 (n=%zu, 20 trials): literal %.3f s, reduced %.3f s\n", g.n(), lit, red);
  return 0;
}
