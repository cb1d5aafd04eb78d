#include "mixsens/spectral.hpp"

#include "mixsens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixsens {

namespace {

void require_dense(const ChainSpec& c, const char* what) {
  if (c.n() > kDenseCap)
    throw Error(std::string(what) + ": " + std::to_string(c.n()) + " states exceed the dense cap of " +
                std::to_string(kDenseCap) + "; use the Monte Carlo walkers instead");
}

Eigen::VectorXd pi_vector(const ChainSpec& c) {
  return Eigen::Map<const Eigen::VectorXd>(c.pi.data(), static_cast<Eigen::Index>(c.n()));
}

}  // namespace

Eigen::MatrixXd symmetrized_operator(const ChainSpec& c) {
  require_dense(c, "spectrum");
  const Eigen::MatrixXd m = dense_operator(c);
  const Eigen::VectorXd s = pi_vector(c).cwiseSqrt();
  Eigen::MatrixXd out = s.asDiagonal() * m * s.cwiseInverse().asDiagonal();
  return 0.5 * (out + out.transpose());
}

SpectralSummary spectrum(const ChainSpec& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized_operator(c), Eigen::EigenvaluesOnly);
  SpectralSummary s;
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  s.gap = s.eigenvalues.size() > 1 ? s.eigenvalues[1] : 0.0;
  s.relaxation_time = s.gap > 0.0 ? 1.0 / s.gap : std::numeric_limits<double>::infinity();
  return s;
}

Eigen::MatrixXd flow_matrix(const ChainSpec& c) {
  require_dense(c, "flow matrix");
  Eigen::MatrixXd f = pi_vector(c).asDiagonal() * dense_kernel(c);
  f.diagonal().setZero();
  return 0.5 * (f + f.transpose());
}

CheegerResult cheeger(const ChainSpec& c) {
  const std::size_t n = c.n();
  if (n > kExactCheegerCap)
    throw Error("cheeger: exact enumeration needs n <= 20; use the spectral bounds lambda_2/2 <= Phi instead");
  if (n < 2) throw Error("cheeger: need at least 2 states");
  const Eigen::MatrixXd f = flow_matrix(c);
  const Eigen::VectorXd out = f.rowwise().sum();
  std::vector<char> in(n, 0);
  double q = 0.0, mass = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0, mask = 0;
  const std::uint32_t total = 1u << n;
  for (std::uint32_t i = 1; i < total; ++i) {
    const auto j = static_cast<std::size_t>(__builtin_ctz(i));
    double inner = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      if (in[a] && a != j) inner += f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j));
    const auto jj = static_cast<Eigen::Index>(j);
    if (in[j]) {
      q -= out(jj) - 2.0 * inner;
      mass -= c.pi[j];
    } else {
      q += out(jj) - 2.0 * inner;
      mass += c.pi[j];
    }
    in[j] ^= 1;
    mask ^= 1u << j;
    if (mass <= 0.5 + 1e-12 && mass > 0.0 && q / mass < best) {
      best = q / mass;
      best_mask = mask;
    }
  }
  CheegerResult r;
  double qq = 0.0, pm = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (!(best_mask >> x & 1u)) continue;
    r.set.push_back(static_cast<Vertex>(x));
    pm += c.pi[x];
    for (std::size_t y = 0; y < n; ++y)
      if (!(best_mask >> y & 1u)) qq += f(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  r.phi = qq / pm;
  return r;
}

namespace {

std::vector<Vertex> normalized_subset(const ChainSpec& c, std::span<const Vertex> subset) {
  std::vector<Vertex> a(subset.begin(), subset.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  if (a.empty()) throw Error("restricted: subset is empty");
  if (a.back() >= c.n()) throw Error("restricted: subset vertex out of range");
  if (a.size() == c.n()) throw Error("restricted: subset must be a strict subset of the state space");
  return a;
}

Eigen::MatrixXd principal(const Eigen::MatrixXd& m, const std::vector<Vertex>& a) {
  const auto k = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd s(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) s(i, j) = m(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)]);
  return s;
}

}  // namespace

RestrictedSpectrum restricted(const ChainSpec& c, std::span<const Vertex> subset, bool exact_phi) {
  RestrictedSpectrum r;
  r.subset = normalized_subset(c, subset);
  const auto& a = r.subset;
  const Eigen::MatrixXd s = principal(symmetrized_operator(c), a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  r.lambda = es.eigenvalues().minCoeff();
  if (c.timebase == Timebase::continuous)
    for (Vertex x : a) r.max_diag = std::max(r.max_diag, c.total_rate[x]);
  if (!exact_phi) return r;
  if (a.size() > kExactCheegerCap) throw Error("restricted: exact Phi(A) needs |A| <= 20");
  const Eigen::MatrixXd f = flow_matrix(c);
  const Eigen::VectorXd out = f.rowwise().sum();
  const std::size_t k = a.size();
  std::vector<char> in(k, 0);
  double q = 0.0, mass = 0.0, best = std::numeric_limits<double>::infinity();
  std::uint32_t mask = 0, best_mask = 0;
  for (std::uint32_t i = 1; i < (1u << k); ++i) {
    const auto j = static_cast<std::size_t>(__builtin_ctz(i));
    double inner = 0.0;
    for (std::size_t b = 0; b < k; ++b)
      if (in[b] && b != j) inner += f(a[b], a[j]);
    if (in[j]) {
      q -= out(a[j]) - 2.0 * inner;
      mass -= c.pi[a[j]];
    } else {
      q += out(a[j]) - 2.0 * inner;
      mass += c.pi[a[j]];
    }
    in[j] ^= 1;
    mask ^= 1u << j;
    if (mass > 0.0 && q / mass < best) {
      best = q / mass;
      best_mask = mask;
    }
  }
  std::vector<char> member(c.n(), 0);
  double pm = 0.0;
  for (std::size_t b = 0; b < k; ++b)
    if (best_mask >> b & 1u) {
      r.argmin.push_back(a[b]);
      member[a[b]] = 1;
      pm += c.pi[a[b]];
    }
  double qq = 0.0;
  for (Vertex x : r.argmin)
    for (std::size_t y = 0; y < c.n(); ++y)
      if (!member[y]) qq += f(x, static_cast<Eigen::Index>(y));
  r.phi = qq / pm;
  return r;
}

ExitTail exit_tail_check(const ChainSpec& c, std::span<const Vertex> subset, double t) {
  if (!(t >= 0.0)) throw Error("exit tail: t must be >= 0");
  const auto rs = restricted(c, subset, false);
  const auto& a = rs.subset;
  const auto k = static_cast<Eigen::Index>(a.size());
  Eigen::VectorXd wa(k);
  double pa = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) pa += c.pi[a[static_cast<std::size_t>(i)]];
  for (Eigen::Index i = 0; i < k; ++i) wa(i) = c.pi[a[static_cast<std::size_t>(i)]] / pa;
  const Eigen::MatrixXd ka = principal(dense_kernel(c), a);
  ExitTail r;
  if (c.timebase == Timebase::lazy) {
    const auto steps = static_cast<long>(std::floor(t + 1e-12));
    Eigen::VectorXd v = Eigen::VectorXd::Ones(k);
    for (long s = 0; s < steps; ++s) v = ka * v;
    r.lhs = wa.dot(v);
    r.rhs = std::exp(-rs.lambda * static_cast<double>(steps));
  } else {
    const double lam = std::max(rs.max_diag, 1e-300);
    const Eigen::MatrixXd pt = Eigen::MatrixXd::Identity(k, k) + ka / lam;
    const double mean = lam * t;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(k);
    double acc = 0.0;
    const std::size_t kmax = poisson_cutoff(mean);
    for (std::size_t j = 0; j <= kmax; ++j) {
      acc += poisson_weight(mean, j) * wa.dot(v);
      v = pt * v;
    }
    r.lhs = acc;
    r.rhs = std::exp(-rs.lambda * t);
  }
  return r;
}

double avg_l2_mixing(std::span<const double> ev, Timebase tb) {
  if (ev.size() < 2) return 0.0;
  if (!(ev[1] > 0.0)) throw Error("avg L2 mixing: spectral gap is zero (chain not irreducible)");
  if (tb == Timebase::lazy) {
    auto f = [&](double t) {
      double s = 0.0;
      for (std::size_t i = 1; i < ev.size(); ++i) s += std::pow(std::max(0.0, (1.0 - ev[i]) * (1.0 - ev[i])), t);
      return s;
    };
    if (f(0.0) <= 0.25) return 0.0;
    double hi = 1.0;
    while (f(hi) > 0.25) {
      hi *= 2.0;
      if (hi > 1e15) throw Error("avg L2 mixing: no finite mixing time");
    }
    double lo = std::floor(hi / 2.0);  // f(lo) > 1/4
    while (hi - lo > 1.0) {
      const double mid = std::floor((lo + hi) / 2.0);
      (f(mid) > 0.25 ? lo : hi) = mid;
    }
    return hi;
  }
  auto f = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 1; i < ev.size(); ++i) s += std::exp(-2.0 * ev[i] * t);
    return s;
  };
  if (f(0.0) <= 0.25) return 0.0;
  double hi = 1.0 / ev[1];
  while (f(hi) > 0.25) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.25 ? lo : hi) = mid;
  }
  return hi;
}

namespace {

Eigen::MatrixXd matrix_power(Eigen::MatrixXd base, std::uint64_t e) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(base.rows(), base.cols());
  while (e > 0) {
    if (e & 1u) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

// Tr exp(s L) by uniformization.
double trace_exp(const ChainSpec& c, double s) {
  const Eigen::MatrixXd l = dense_kernel(c);
  const double lam = *std::max_element(c.total_rate.begin(), c.total_rate.end());
  const auto n = l.rows();
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) + l / lam;
  Eigen::MatrixXd pk = Eigen::MatrixXd::Identity(n, n);
  double acc = 0.0;
  const double mean = lam * s;
  const std::size_t kmax = poisson_cutoff(mean);
  for (std::size_t k = 0; k <= kmax; ++k) {
    acc += poisson_weight(mean, k) * pk.trace();
    pk = pk * p;
  }
  return acc;
}

}  // namespace

AvgL2 avg_l2_mixing(const ChainSpec& c, bool trace_check) {
  const auto sp = spectrum(c);
  AvgL2 r;
  r.time = avg_l2_mixing(sp.eigenvalues, c.timebase);
  if (!trace_check || c.n() > 200) return r;
  auto spectral_sum = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 1; i < sp.eigenvalues.size(); ++i) {
      const double l = sp.eigenvalues[i];
      s += c.timebase == Timebase::lazy ? std::pow((1.0 - l) * (1.0 - l), t) : std::exp(-2.0 * l * t);
    }
    return s;
  };
  std::vector<double> probes{r.time};
  if (c.timebase == Timebase::lazy && r.time >= 1.0) probes.push_back(r.time - 1.0);
  if (c.timebase == Timebase::continuous) probes.push_back(0.5 * r.time);
  r.trace_residual = 0.0;
  for (double t : probes) {
    double tr;
    if (c.timebase == Timebase::lazy)
      tr = matrix_power(dense_kernel(c), static_cast<std::uint64_t>(2.0 * t)).trace();
    else
      tr = trace_exp(c, 2.0 * t);
    r.trace_residual = std::max(r.trace_residual, std::abs(tr - 1.0 - spectral_sum(t)));
  }
  return r;
}

namespace {

struct Distances {
  double l2;    // max_x ||P_t(x,.)/pi - 1||_{2,pi}
  double unif;  // max_{x,y} |P_t(x,y)/pi(y) - 1|
};

Distances distances(const Eigen::MatrixXd& pt, const std::vector<double>& pi) {
  Distances d{0.0, 0.0};
  const auto n = pt.rows();
  for (Eigen::Index x = 0; x < n; ++x) {
    double s = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      const double r = pt(x, y) / pi[static_cast<std::size_t>(y)] - 1.0;
      s += pi[static_cast<std::size_t>(y)] * r * r;
      d.unif = std::max(d.unif, std::abs(r));
    }
    d.l2 = std::max(d.l2, std::sqrt(s));
  }
  return d;
}

// max_x | ||P_t(x,.)/pi - 1||^2 - (P_2t(x,x)/pi(x) - 1) |
double diagonal_residual(const Eigen::MatrixXd& pt, const Eigen::MatrixXd& p2t, const std::vector<double>& pi) {
  double worst = 0.0;
  const auto n = pt.rows();
  for (Eigen::Index x = 0; x < n; ++x) {
    double s = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      const double r = pt(x, y) / pi[static_cast<std::size_t>(y)] - 1.0;
      s += pi[static_cast<std::size_t>(y)] * r * r;
    }
    worst = std::max(worst, std::abs(s - (p2t(x, x) / pi[static_cast<std::size_t>(x)] - 1.0)));
  }
  return worst;
}

}  // namespace

L2Uniform l2_uniform_mixing(const ChainSpec& c) {
  require_dense(c, "L2 mixing");
  L2Uniform r;
  const auto n = static_cast<Eigen::Index>(c.n());
  if (c.timebase == Timebase::lazy) {
    const Eigen::MatrixXd p = dense_kernel(c);
    Eigen::MatrixXd pt = Eigen::MatrixXd::Identity(n, n);
    bool have2 = false, haveu = false;
    for (long t = 0; !(have2 && haveu); ++t) {
      if (t > 1'000'000) throw Error("L2 mixing: no convergence within 10^6 steps");
      if (t > 0) pt = pt * p;
      const auto d = distances(pt, c.pi);
      r.diag_residual = std::max(r.diag_residual, diagonal_residual(pt, pt * pt, c.pi));
      if (!have2 && d.l2 <= 0.5) {
        have2 = true;
        r.mix2 = static_cast<double>(t);
      }
      if (!haveu && d.unif <= 0.25) {
        haveu = true;
        r.mixunif = static_cast<double>(t);
      }
    }
    r.sandwich = r.mix2 <= r.mixunif && r.mixunif <= 2.0 * r.mix2;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized_operator(c));
  const Eigen::VectorXd s = pi_vector(c).cwiseSqrt();
  const Eigen::MatrixXd left = s.cwiseInverse().asDiagonal() * es.eigenvectors();
  const Eigen::MatrixXd right = es.eigenvectors().transpose() * s.asDiagonal();
  auto kernel_at = [&](double t) {
    const Eigen::VectorXd e = (-t * es.eigenvalues().array()).exp().matrix();
    return Eigen::MatrixXd(left * e.asDiagonal() * right);
  };
  auto solve = [&](auto metric, double level) {
    if (metric(distances(kernel_at(0.0), c.pi)) <= level) return 0.0;
    const double gap = std::max(es.eigenvalues()(std::min<Eigen::Index>(1, n - 1)), 1e-300);
    double hi = 1.0 / gap, lo = 0.0;
    while (metric(distances(kernel_at(hi), c.pi)) > level) hi *= 2.0;
    while (hi - lo > 1e-9 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      (metric(distances(kernel_at(mid), c.pi)) > level ? lo : hi) = mid;
    }
    return hi;
  };
  r.mix2 = solve([](const Distances& d) { return d.l2; }, 0.5);
  r.mixunif = solve([](const Distances& d) { return d.unif; }, 0.25);
  for (double t : {0.0, 0.5 * r.mix2, r.mix2, r.mixunif, 2.0 * r.mixunif})
    r.diag_residual = std::max(r.diag_residual, diagonal_residual(kernel_at(t), kernel_at(2.0 * t), c.pi));
  const double slack = 1e-8 * std::max(1.0, r.mixunif);
  r.sandwich = r.mix2 <= r.mixunif + slack && r.mixunif <= 2.0 * r.mix2 + slack;
  return r;
}

DirichletCertificate dirichlet_compare(const ChainSpec& a, const ChainSpec& b) {
  if (a.n() != b.n()) throw Error("dirichlet_compare: chains live on different state spaces");
  if (a.timebase != b.timebase) throw Error("dirichlet_compare: chains use different timebases");
  const Eigen::MatrixXd fa = flow_matrix(a), fb = flow_matrix(b);
  DirichletCertificate r;
  r.c = 1.0;
  const auto n = static_cast<Eigen::Index>(a.n());
  for (Eigen::Index x = 0; x < n; ++x) {
    const double pa = a.pi[static_cast<std::size_t>(x)], pb = b.pi[static_cast<std::size_t>(x)];
    r.c = std::min({r.c, pa / pb, pb / pa});
    for (Eigen::Index y = x + 1; y < n; ++y) {
      const double qa = fa(x, y), qb = fb(x, y);
      if (qa == 0.0 && qb == 0.0) continue;
      if (qa == 0.0 || qb == 0.0) {
        r.c = 0.0;
        r.diagnostic = "edge sets differ at (" + std::to_string(x) + "," + std::to_string(y) +
                       "): no edgewise certificate";
        return r;
      }
      r.c = std::min({r.c, qa / qb, qb / qa});
    }
  }
  r.diagnostic = "edgewise certificate";
  return r;
}

EigenCompare eigen_compare_check(const ChainSpec& a, const ChainSpec& b, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw Error("eigen_compare_check: c must lie in (0, 1]");
  const auto sa = spectrum(a), sb = spectrum(b);
  if (sa.eigenvalues.size() != sb.eigenvalues.size()) throw Error("eigen_compare_check: size mismatch");
  EigenCompare r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  const double c2 = c * c;
  bool ok = true;
  for (std::size_t i = 0; i < sa.eigenvalues.size(); ++i) {
    const double l = sa.eigenvalues[i], lp = sb.eigenvalues[i];
    const double margin = std::min(lp - c2 * l, l / c2 - lp);
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -kAssertTolerance * std::max(1.0, l / c2)) ok = false;
  }
  r.pass = ok;
  r.avg_l2_a = avg_l2_mixing(sa.eigenvalues, a.timebase);
  r.avg_l2_b = avg_l2_mixing(sb.eigenvalues, b.timebase);
  if (r.avg_l2_a == 0.0 && r.avg_l2_b == 0.0) r.avg_l2_ratio = 1.0;
  else if (r.avg_l2_a == 0.0 || r.avg_l2_b == 0.0) r.avg_l2_ratio = std::numeric_limits<double>::infinity();
  else r.avg_l2_ratio = std::max(r.avg_l2_a / r.avg_l2_b, r.avg_l2_b / r.avg_l2_a);
  r.avg_l2_pass = r.avg_l2_ratio <= 1.0 / c2 + 1.0 + 1e-9;
  return r;
}

}  // namespace mixsens
