#pragma once

// Reference computations written directly from the definitions, used to
// cross-check library results. Dense and slow on purpose.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mixsens/chain.hpp"
#include "mixsens/graph.hpp"

namespace oracle {

using mixsens::Timebase;
using mixsens::Vertex;
using mixsens::WeightedGraph;

inline Eigen::MatrixXd weights(const WeightedGraph& g) {
  const auto m = g.materialized();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<long>(g.n()), static_cast<long>(g.n()));
  for (const auto& e : m.edges()) w(e.u, e.v) = w(e.v, e.u) = e.w;
  return w;
}

struct Chain {
  Eigen::MatrixXd op;  // I - P or -L
  Eigen::VectorXd pi;
};

inline Chain chain(const WeightedGraph& g, Timebase tb) {
  const Eigen::MatrixXd w = weights(g);
  const Eigen::VectorXd d = w.rowwise().sum();
  const long n = w.rows();
  Chain c;
  if (tb == Timebase::lazy) {
    c.op = Eigen::MatrixXd::Identity(n, n);
    for (long x = 0; x < n; ++x) {
      c.op(x, x) -= 0.5;
      for (long y = 0; y < n; ++y) c.op(x, y) -= w(x, y) / (2 * d(x));
    }
    c.pi = d / d.sum();
  } else {
    c.op = -w;
    for (long x = 0; x < n; ++x) c.op(x, x) += d(x);
    c.pi = Eigen::VectorXd::Constant(n, 1.0 / n);
  }
  return c;
}

inline Eigen::MatrixXd symmetrize(const Chain& c, const std::vector<Vertex>& idx) {
  const long k = static_cast<long>(idx.size());
  Eigen::MatrixXd s(k, k);
  for (long i = 0; i < k; ++i)
    for (long j = 0; j < k; ++j)
      s(i, j) = std::sqrt(c.pi(idx[i]) / c.pi(idx[j])) * c.op(idx[i], idx[j]);
  return 0.5 * (s + s.transpose());
}

inline std::vector<Vertex> all(std::size_t n) {
  std::vector<Vertex> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Vertex>(i);
  return v;
}

inline Eigen::VectorXd eigenvalues(const Chain& c, const std::vector<Vertex>& idx) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(c, idx), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// min over nonempty B within `within` (mask) of Q(B, B^c)/pi(B), optionally with pi(B) <= 1/2.
inline double phi(const Chain& c, const std::vector<Vertex>& within, bool half_mass) {
  const long n = c.pi.size();
  const std::size_t k = within.size();
  double best = INFINITY;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    double mass = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1) {
        in[within[i]] = 1;
        mass += c.pi(within[i]);
      }
    if (half_mass && mass > 0.5 + 1e-12) continue;
    double q = 0.0;
    for (long x = 0; x < n; ++x)
      if (in[static_cast<std::size_t>(x)])
        for (long y = 0; y < n; ++y)
          if (!in[static_cast<std::size_t>(y)]) q += -c.pi(x) * c.op(x, y);
    best = std::min(best, q / mass);
  }
  return best;
}

/// Pr_{pi_A}[T_{A^c} > t] from the spectral decomposition of the restriction.
inline double exit_tail(const Chain& c, const std::vector<Vertex>& a, double t, Timebase tb) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(c, a));
  const long k = static_cast<long>(a.size());
  Eigen::VectorXd r(k);
  double mass = 0.0;
  for (long i = 0; i < k; ++i) {
    r(i) = std::sqrt(c.pi(a[i]));
    mass += c.pi(a[i]);
  }
  const Eigen::VectorXd coef = es.eigenvectors().transpose() * r;
  double s = 0.0;
  for (long i = 0; i < k; ++i) {
    const double mu = es.eigenvalues()(i);
    const double f = tb == Timebase::lazy ? std::pow(1.0 - mu, std::floor(t)) : std::exp(-mu * t);
    s += coef(i) * coef(i) * f;
  }
  return s / mass;
}

/// P_t as a dense matrix.
inline Eigen::MatrixXd transition(const Chain& c, double t, Timebase tb) {
  const auto idx = all(static_cast<std::size_t>(c.pi.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(c, idx));
  Eigen::VectorXd f(es.eigenvalues().size());
  for (long i = 0; i < f.size(); ++i) {
    const double mu = es.eigenvalues()(i);
    f(i) = tb == Timebase::lazy ? std::pow(1.0 - mu, t) : std::exp(-mu * t);
  }
  const Eigen::MatrixXd s = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::VectorXd sq = c.pi.cwiseSqrt();
  return sq.cwiseInverse().asDiagonal() * s * sq.asDiagonal();
}

/// Pr_v[first hit of targets is at targets[j]] by a dense absorbing solve.
inline std::vector<double> absorption(const WeightedGraph& g, Vertex v, const std::vector<Vertex>& targets) {
  const Eigen::MatrixXd w = weights(g);
  const long n = w.rows();
  std::vector<long> pos(static_cast<std::size_t>(n), -1);
  std::vector<Vertex> free;
  for (long x = 0; x < n; ++x)
    if (std::find(targets.begin(), targets.end(), static_cast<Vertex>(x)) == targets.end()) {
      pos[static_cast<std::size_t>(x)] = static_cast<long>(free.size());
      free.push_back(static_cast<Vertex>(x));
    }
  const long m = static_cast<long>(free.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, static_cast<long>(targets.size()));
  for (long i = 0; i < m; ++i) {
    const Vertex x = free[static_cast<std::size_t>(i)];
    a(i, i) = w.row(x).sum();
    for (long y = 0; y < n; ++y) {
      if (w(x, y) == 0) continue;
      if (pos[static_cast<std::size_t>(y)] >= 0) a(i, pos[static_cast<std::size_t>(y)]) -= w(x, y);
      else
        for (std::size_t j = 0; j < targets.size(); ++j)
          if (targets[j] == static_cast<Vertex>(y)) b(i, static_cast<long>(j)) += w(x, y);
    }
  }
  const Eigen::MatrixXd h = a.fullPivLu().solve(b);
  std::vector<double> out;
  for (std::size_t j = 0; j < targets.size(); ++j) out.push_back(h(pos[v], static_cast<long>(j)));
  return out;
}

}  // namespace oracle
