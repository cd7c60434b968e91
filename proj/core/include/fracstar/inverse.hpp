#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fracstar/direct.hpp"

namespace fracstar {

/// Inverse source problem: find the amplitude f(t) in source f(t) g_k(x,t)
/// + h_k(x,t) from the overdetermination data psi(t) = moment of the state
/// against the weight eta. eta must come in representation form so its
/// beta-derivative (the phi component) and traces are exact.
struct InverseProblem {
  Coefficients coeff;
  FracOrder alpha;
  FracOrder beta;
  TimeGrid time;
  SpaceTimeField g;
  SpaceTimeField h;  // empty = zero
  SingularRepresentation eta;
  TimeSeries psi;

  InverseProblem(Coefficients coeff, FracOrder alpha, FracOrder beta,
                 TimeGrid time, SpaceTimeField g, SpaceTimeField h,
                 SingularRepresentation eta, TimeSeries psi);

  const StarGraph& graph() const { return coeff.graph(); }
};

/// Feasibility constants of the contraction estimate:
/// c bounds ||g(.,t)||, m = ||phi_eta||, q = min |g*|, C = p2^2 m^2 c^2 /
/// (p1 q^2).
struct K1Report {
  double c = 0.0;
  double m = 0.0;
  double q = 0.0;
  double C = 0.0;
  bool feasible = false;
  std::vector<std::string> violations;
};

double k1_constant(double p1, double p2, double c, double m, double q);

/// g*(t_m) = sum_k int eta_k g_k(., t_m), singular-aware in eta.
TimeSeries compute_g_star(const InverseProblem& p);

K1Report check_K1(const InverseProblem& p);

/// sum_k int eta_k u_k dx for two representations on the same graph/beta.
double overdetermination_moment(const SingularRepresentation& u,
                                const SingularRepresentation& eta);

/// Same moment with a plain nodal field in place of the second
/// representation (used for g(., t)).
double overdetermination_moment(const SingularRepresentation& eta,
                                const GraphSeries& values);

/// E(t_m) = psi(t_m) - moment(y^m, eta). Rejects |E(0)| >
/// compat_tol_factor * max|psi| since zero initial data forces E(0) = 0.
TimeSeries compute_E(const InverseProblem& p, const DirectSolution& y,
                     double compat_tol_factor = 1e-8);

/// One application of the fixed-point operator: solve the direct problem
/// with source f(t) g(x,t), then (Bf)(t_m) = (1/g*(t_m)) sum_k int gamma_k
/// phi_{z,k} phi_{eta,k} dx.
TimeSeries apply_B(const TimeSeries& f, const InverseProblem& p);

struct InverseSolution {
  TimeSeries f;
  DirectSolution z;
  std::size_t iterations = 0;
  std::vector<double> residual_history;  // increment norms per iteration
  double neumann_bound = 0.0;            // resolvent norm bound from the tail
  double overdetermination_residual = 0.0;
  bool converged = false;
};

/// Fixed-point iteration f^{k+1} = B f^k + r with r = ∂^alpha E / g*,
/// started from f^0 = r (or the given initial guess); stops when the
/// L2(0,T) increment drops below tol. On success re-solves with the
/// recovered source and reports the overdetermination residual.
InverseSolution solve_inverse(const InverseProblem& p, double tol,
                              std::size_t max_iter,
                              const std::optional<TimeSeries>& start = {});

struct NeumannTail {
  std::vector<double> partial_sums;
  bool converged = false;
};

/// Partial sums of sum_j (sqrt(C) T^alpha)^j / sqrt(Gamma(j alpha + 1));
/// converged once a term falls below 1e-15 before j_max.
NeumannTail neumann_tail(double C, FracOrder alpha, double T,
                         std::size_t j_max);

}  // namespace fracstar
