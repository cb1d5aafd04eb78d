#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "mixsens/chain.hpp"

namespace mixsens {

inline constexpr double kAssertTolerance = 1e-10;
inline constexpr std::size_t kDenseCap = 4000;
inline constexpr std::size_t kExactCheegerCap = 20;

struct SpectralSummary {
  std::vector<double> eigenvalues;  // of I - P or -L, ascending
  double gap = 0.0;
  double relaxation_time = 0.0;
};

/// D^{1/2} (I-P) D^{-1/2} (or the -L analogue), symmetrized.
Eigen::MatrixXd symmetrized_operator(const ChainSpec& chain);
SpectralSummary spectrum(const ChainSpec& chain);

/// Dense flow matrix Q(x,y) = pi(x) K(x,y), x != y; zero diagonal.
Eigen::MatrixXd flow_matrix(const ChainSpec& chain);

struct CheegerResult {
  double phi = 0.0;
  std::vector<Vertex> set;
};

/// Exhaustive over subsets with pi(A) <= 1/2; n <= 20.
CheegerResult cheeger(const ChainSpec& chain);

struct RestrictedSpectrum {
  std::vector<Vertex> subset;
  double lambda = 0.0;  // smallest eigenvalue of the operator restricted to A
  double phi = 0.0;     // min over nonempty B ⊆ A of Q(B, B^c) / pi(B)
  std::vector<Vertex> argmin;
  double max_diag = 0.0;  // max_{a in A} |L(a,a)|, continuous chains only
};

RestrictedSpectrum restricted(const ChainSpec& chain, std::span<const Vertex> subset, bool exact_phi = true);

/// Pr_{pi_A}[T_{A^c} > t] and e^{-lambda(A) t}. Discrete chains round t down.
struct ExitTail {
  double lhs = 0.0;
  double rhs = 0.0;
};
ExitTail exit_tail_check(const ChainSpec& chain, std::span<const Vertex> subset, double t);

struct AvgL2 {
  double time = 0.0;
  double trace_residual = -1.0;  // -1 when not checked (n > 200)
};

/// Discrete: least integer t with sum_{i>=2} (1-lambda_i)^{2t} <= 1/4.
/// Continuous: least real t (to 1e-9) with sum_{i>=2} e^{-2 lambda_i t} <= 1/4.
AvgL2 avg_l2_mixing(const ChainSpec& chain, bool trace_check = true);
double avg_l2_mixing(std::span<const double> eigenvalues, Timebase tb);

struct L2Uniform {
  double mix2 = 0.0;
  double mixunif = 0.0;
  double diag_residual = 0.0;
  bool sandwich = false;
};
L2Uniform l2_uniform_mixing(const ChainSpec& chain);

struct DirichletCertificate {
  double c = 0.0;
  std::string diagnostic;
};

/// Largest c with c Q'(x,y) <= Q(x,y) <= Q'(x,y)/c and the same for pi,
/// checked pair by pair.
DirichletCertificate dirichlet_compare(const ChainSpec& a, const ChainSpec& b);

struct EigenCompare {
  bool pass = false;
  double worst_margin = 0.0;
  double avg_l2_a = 0.0;
  double avg_l2_b = 0.0;
  double avg_l2_ratio = 0.0;  // max of the two ratios
  bool avg_l2_pass = false;
};

/// c^2 lambda_i <= lambda'_i <= lambda_i / c^2 for every i.
EigenCompare eigen_compare_check(const ChainSpec& a, const ChainSpec& b, double c);

}  // namespace mixsens
