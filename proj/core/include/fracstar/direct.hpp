#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fracstar/spatial.hpp"

namespace fracstar {

/// Evaluator of a space-time field on the graph: (edge index, x, t) -> value.
/// An empty function means identically zero.
using SpaceTimeField = std::function<double(std::size_t, double, double)>;

/// Direct problem: zero initial data, source h, homogeneous vertex and
/// boundary conditions. Requires beta > 1/2 (integrability of the vertex
/// singularity).
///
/// The full source is source(k, x, t) + source_singular(t) x^{beta-1} /
/// Gamma(beta) on every edge. The split exists because sources derived from
/// solutions (manufactured forcings, Caputo derivatives of histories) carry
/// the vertex profile, which the solver must integrate exactly rather than
/// sample; source_singular may be empty when the source is regular.
struct DirectProblem {
  Coefficients coeff;
  FracOrder alpha;
  FracOrder beta;
  TimeGrid time;
  SpaceTimeField source;
  std::function<double(double)> source_singular;

  DirectProblem(Coefficients coeff, FracOrder alpha, FracOrder beta,
                TimeGrid time, SpaceTimeField source);

  const StarGraph& graph() const { return coeff.graph(); }
};

struct DirectDiagnostics {
  double max_boundary_residual = 0.0;
  double max_flux_residual = 0.0;
  double max_rhs_inf = 0.0;  // residual scale: bounds hold vs 1e-10 (1 + this)
  double condition_estimate = 0.0;
};

/// Time history of representations. steps[0] is identically zero; values[m]
/// caches node_values(steps[m]).values (regular part only at node 0).
struct DirectSolution {
  TimeGrid time;
  std::vector<SingularRepresentation> steps;
  std::vector<GraphSeries> values;
  DirectDiagnostics diagnostics;
};

/// L1-implicit scheme: with d0 = dt^{-alpha}/Gamma(2-alpha) and weights a_j,
/// step m solves (d0 + L) u^m = h(., t_m) + d0 sum_{j=1}^{m-1}
/// (a_{j-1} - a_j) u^{m-j} (the a_{m-1} u^0 term vanishes with zero initial
/// data). The stepping operator is factored once and reused.
DirectSolution solve_direct(const DirectProblem& p);

/// Same scheme with a prefactored operator and presampled source values
/// (source_at[m] holds the regular part of h(., t_m); index 0 is unused).
/// singular_at, when nonempty, holds the coefficient of the vertex profile
/// x^{beta-1}/Gamma(beta) in h(., t_m), one entry per time node. Building
/// block for iterative callers that solve many right-hand sides on one
/// grid; op must come from assemble_stepping(dt^{-alpha}/Gamma(2-alpha), ...).
DirectSolution solve_direct_prefactored(
    const SteppingOperator& op, FracOrder alpha, TimeGrid time,
    const std::vector<GraphSeries>& source_at,
    const std::vector<double>& singular_at = {});

/// Discrete shadow of the a-priori energy identity: per step accumulate
///   lhs_m = sum_{r<=m} dt [ |∂^a u^r|^2 + |L u^r|^2 ]_Gamma
///           + p1 (I^{1-a} ||phi||^2_Gamma)(t_m)
///   rhs_m = sum_{r<=m} dt |(∂^a + L) u^r|^2_Gamma
/// with the L1 time derivative on the stored representations.
struct EnergyMonitor {
  TimeSeries lhs;
  TimeSeries rhs;
};

EnergyMonitor energy_monitor(const DirectSolution& sol,
                             const DirectProblem& p);

/// Per-trajectory check of ||u||_{L2(0,T)} <= T^alpha/Gamma(alpha+1)
/// ||∂^alpha u||_{L2(0,T)} with 2% slack, on a sample of interior nodes.
struct FriedrichsReport {
  double worst_ratio = 0.0;
  std::size_t samples = 0;
  bool all_within = true;
  double slack = 0.02;
};

FriedrichsReport friedrichs_check(const DirectSolution& sol,
                                  const DirectProblem& p);

/// ratio ||v|| / (T^alpha/Gamma(alpha+1) ||∂^alpha v||) for one trajectory;
/// 0 when the trajectory vanishes.
double friedrichs_ratio(const TimeSeries& v, FracOrder alpha);

}  // namespace fracstar
