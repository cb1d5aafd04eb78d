#include <limits>
#include <algorithm>
#include <cmath>

#include "mixsens/interchange.hpp"

namespace mixsens {

namespace {

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::uint32_t rank_permutation(std::span<const std::uint32_t> p) {
  const std::size_t n = p.size();
  if (n > 12) throw Error("rank: permutations of more than 12 elements do not fit 32 bits");
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t smaller = 0;
    for (std::size_t j = i + 1; j < n; ++j) smaller += p[j] < p[i];
    r = r * (n - i) + smaller;
  }
  return static_cast<std::uint32_t>(r);
}

std::vector<std::uint32_t> unrank_permutation(std::uint32_t rank, std::size_t n) {
  std::vector<std::uint32_t> digits(n);
  std::uint64_t r = rank;
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t base = n - i;
    digits[i] = static_cast<std::uint32_t>(r % base);
    r /= base;
  }
  if (r != 0) throw Error("unrank: rank out of range");
  std::vector<std::uint32_t> pool(n), out(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = pool[digits[i]];
    pool.erase(pool.begin() + digits[i]);
  }
  return out;
}

ExactInterchange build_exact_interchange(const WeightedGraph& g0, std::size_t max_n) {
  if (max_n > 8) throw Error("exact interchange: n! beyond 8! states is not supported");
  const WeightedGraph g = g0.materialized();
  if (g.n() > max_n)
    throw Error("exact interchange: n = " + std::to_string(g.n()) + " exceeds the cap of " + std::to_string(max_n) +
                " (raise --max-n up to 7 to opt in)");
  if (g.n() < 2 || !g.is_connected()) throw Error("exact interchange: need a connected graph on >= 2 vertices");
  ExactInterchange ex;
  ex.n = g.n();
  ex.states = factorial(ex.n);
  ex.edges = g.num_explicit_edges();
  for (const auto& e : g.edges()) ex.total_rate += e.w;
  for (const auto& e : g.edges()) ex.coeff.push_back(e.w / ex.total_rate);
  ex.nbr.resize(ex.states * ex.edges);
  for (std::size_t s = 0; s < ex.states; ++s) {
    auto p = unrank_permutation(static_cast<std::uint32_t>(s), ex.n);
    for (std::size_t e = 0; e < ex.edges; ++e) {
      const auto& ed = g.edge(static_cast<EdgeId>(e));
      std::swap(p[ed.u], p[ed.v]);
      ex.nbr[s * ex.edges + e] = rank_permutation(p);
      std::swap(p[ed.u], p[ed.v]);
    }
  }
  return ex;
}

void exact_apply(const ExactInterchange& ex, const std::vector<double>& in, std::vector<double>& out, bool parallel) {
  out.resize(ex.states);
  const auto states = static_cast<long long>(ex.states);
  const std::size_t m = ex.edges;
  const std::uint32_t* nbr = ex.nbr.data();
  const double* c = ex.coeff.data();
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long s = 0; s < states; ++s) {
      const std::uint32_t* row = nbr + static_cast<std::size_t>(s) * m;
      double acc = 0.0;
      for (std::size_t e = 0; e < m; ++e) acc += c[e] * in[row[e]];
      out[static_cast<std::size_t>(s)] = acc;
    }
  } else {
    for (long long s = 0; s < states; ++s) {
      const std::uint32_t* row = nbr + static_cast<std::size_t>(s) * m;
      double acc = 0.0;
      for (std::size_t e = 0; e < m; ++e) acc += c[e] * in[row[e]];
      out[static_cast<std::size_t>(s)] = acc;
    }
  }
}

double tv_to_uniform(const std::vector<double>& p) {
  const double u = 1.0 / static_cast<double>(p.size());
  double s = 0.0;
  for (double x : p) s += std::abs(x - u);
  return 0.5 * s;
}

namespace {

std::vector<double> point_mass(const ExactInterchange& ex) {
  std::vector<double> v(ex.states, 0.0);
  v[0] = 1.0;  // identity has rank 0
  return v;
}

void lazy_step(const ExactInterchange& ex, std::vector<double>& v, std::vector<double>& tmp, bool parallel) {
  exact_apply(ex, v, tmp, parallel);
  for (std::size_t s = 0; s < ex.states; ++s) v[s] = 0.5 * v[s] + 0.5 * tmp[s];
}

}  // namespace

std::vector<double> exact_tv_curve(const ExactInterchange& ex, Timebase tb, std::span<const double> times,
                                   bool parallel) {
  for (double t : times)
    if (!(t >= 0.0)) throw Error("exact tv: times must be >= 0");
  std::vector<double> out(times.size());
  if (tb == Timebase::lazy) {
    std::vector<std::size_t> order(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });
    auto v = point_mass(ex);
    std::vector<double> tmp;
    long step = 0;
    for (auto i : order) {
      const auto target = static_cast<long>(std::floor(times[i] + 1e-12));
      for (; step < target; ++step) lazy_step(ex, v, tmp, parallel);
      out[i] = tv_to_uniform(v);
    }
    return out;
  }
  double tmax = 0.0;
  for (double t : times) tmax = std::max(tmax, t);
  const std::size_t kmax = poisson_cutoff(ex.total_rate * tmax);
  std::vector<std::vector<double>> acc(times.size(), std::vector<double>(ex.states, 0.0));
  auto v = point_mass(ex);
  std::vector<double> tmp;
  for (std::size_t k = 0; k <= kmax; ++k) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double w = poisson_weight(ex.total_rate * times[i], k);
      if (w == 0.0) continue;
      for (std::size_t s = 0; s < ex.states; ++s) acc[i][s] += w * v[s];
    }
    exact_apply(ex, v, tmp, parallel);
    std::swap(v, tmp);
  }
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = tv_to_uniform(acc[i]);
  return out;
}

double exact_mixing_time(const ExactInterchange& ex, Timebase tb, double threshold, bool parallel) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("exact mixing: threshold must lie in (0, 1)");
  if (tb == Timebase::lazy) {
    auto v = point_mass(ex);
    std::vector<double> tmp;
    for (long step = 0; step <= 10'000'000; ++step) {
      if (tv_to_uniform(v) <= threshold) return static_cast<double>(step);
      lazy_step(ex, v, tmp, parallel);
    }
    throw Error("exact mixing: no crossing within 10^7 steps");
  }
  auto tv = [&](double t) {
    const double ts[1] = {t};
    return exact_tv_curve(ex, tb, ts, parallel)[0];
  };
  if (tv(0.0) <= threshold) return 0.0;
  double hi = 1.0 / ex.total_rate;
  while (tv(hi) > threshold) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (tv(mid) > threshold ? lo : hi) = mid;
  }
  return hi;
}

TimebaseRatio exact_timebase_ratio(const ExactInterchange& ex, double threshold, bool parallel) {
  TimebaseRatio r;
  r.lazy = exact_mixing_time(ex, Timebase::lazy, threshold, parallel);
  r.continuous = exact_mixing_time(ex, Timebase::continuous, threshold, parallel);
  r.ratio = r.lazy > 0.0 ? ex.total_rate * r.continuous / r.lazy : std::numeric_limits<double>::quiet_NaN();
  r.in_range = r.ratio >= 0.1 && r.ratio <= 10.0;
  return r;
}

}  // namespace mixsens
