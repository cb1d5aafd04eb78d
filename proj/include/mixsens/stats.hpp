#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mixsens {

struct RunningStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningStats& other);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_mean() const;
};

RunningStats summarize(std::span<const double> xs);

/// Linear-interpolated quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> xs, double q);

struct Interval {
  double lo;
  double hi;
};

/// Two-sided Clopper-Pearson interval at the given confidence.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence);
/// One-sided lower confidence bound on p.
double binomial_lower_bound(std::uint64_t successes, std::uint64_t trials, double confidence);

double binomial_pmf(unsigned k, unsigned n, double p);
/// Pr[Bin(n, p) > threshold].
double binomial_tail_above(unsigned n, double p, double threshold);

struct ChiSquareResult {
  double statistic;
  int dof;
  double p_value;
};

/// Goodness of fit of integer-valued counts against probabilities. Adjacent
/// cells are pooled from both ends until every expected count is >= min_expected.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probs,
                               double min_expected = 5.0);

struct KsResult {
  double statistic;
  double p_value;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// One-sample KS against a continuous CDF.
template <class Cdf>
KsResult ks_one_sample(std::vector<double> a, Cdf&& cdf);
double kolmogorov_q(double lambda);

/// Poisson(mean) pmf at k, evaluated in log space.
double poisson_weight(double mean, std::size_t k);
/// Truncation index for uniformization sums (tail mass far below 1e-15).
std::size_t poisson_cutoff(double mean);

}  // namespace mixsens

#include <algorithm>
#include <cmath>

namespace mixsens {

template <class Cdf>
KsResult ks_one_sample(std::vector<double> a, Cdf&& cdf) {
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

}  // namespace mixsens
