#include "mixsens/stats.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "mixsens/graph.hpp"

namespace mixsens {

void RunningStats::add(double x) {
  ++count;
  const double d = x - mean;
  mean += d / static_cast<double>(count);
  m2 += d * (x - mean);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(count + o.count);
  const double d = o.mean - mean;
  mean += d * static_cast<double>(o.count) / n;
  m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
  count += o.count;
}

double RunningStats::stderr_mean() const {
  return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

RunningStats summarize(std::span<const double> xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw Error("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= xs.size()) return xs.back();
  return xs[i] + (h - static_cast<double>(i)) * (xs[i + 1] - xs[i]);
}

Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence) {
  using boost::math::binomial_distribution;
  if (n == 0) return {0.0, 1.0};
  const double alpha = (1.0 - confidence) / 2.0;
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return {binomial_distribution<>::find_lower_bound_on_p(nn, kk, alpha),
          binomial_distribution<>::find_upper_bound_on_p(nn, kk, alpha)};
}

double binomial_lower_bound(std::uint64_t k, std::uint64_t n, double confidence) {
  using boost::math::binomial_distribution;
  if (n == 0 || k == 0) return 0.0;
  return binomial_distribution<>::find_lower_bound_on_p(static_cast<double>(n), static_cast<double>(k),
                                                        1.0 - confidence);
}

double binomial_pmf(unsigned k, unsigned n, double p) {
  if (k > n) return 0.0;
  return boost::math::pdf(boost::math::binomial_distribution<>(n, p), k);
}

double binomial_tail_above(unsigned n, double p, double threshold) {
  double s = 0.0;
  for (unsigned k = 0; k <= n; ++k)
    if (static_cast<double>(k) > threshold) s += binomial_pmf(k, n, p);
  return s;
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probs,
                               double min_expected) {
  if (observed.size() != probs.size() || observed.empty()) throw Error("chi_square_gof: size mismatch");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  std::vector<double> obs(observed.begin(), observed.end());
  std::vector<double> exp(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) exp[i] = probs[i] * total;
  // pool from the left tail
  std::vector<std::pair<double, double>> cells;
  double po = 0.0, pe = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    po += obs[i];
    pe += exp[i];
    if (pe >= min_expected) {
      cells.emplace_back(po, pe);
      po = pe = 0.0;
    }
  }
  if (pe > 0.0 || po > 0.0) {
    if (cells.empty()) cells.emplace_back(po, pe);
    else {
      cells.back().first += po;
      cells.back().second += pe;
    }
  }
  double stat = 0.0;
  for (const auto& [o, e] : cells) {
    if (e <= 0.0) {
      if (o > 0.0) return {std::numeric_limits<double>::infinity(), 0, 0.0};
      continue;
    }
    stat += (o - e) * (o - e) / e;
  }
  const int dof = static_cast<int>(cells.size()) - 1;
  if (dof < 1) return {stat, 0, 1.0};
  return {stat, dof, boost::math::gamma_q(dof / 2.0, stat / 2.0)};
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    s += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

double poisson_weight(double mean, std::size_t k) {
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(-mean + kd * std::log(mean) - std::lgamma(kd + 1.0));
}

std::size_t poisson_cutoff(double mean) {
  return static_cast<std::size_t>(std::ceil(mean + 12.0 * std::sqrt(mean) + 40.0));
}

}  // namespace mixsens
