#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "fracstar/fracops.hpp"
#include "fracstar/graph.hpp"

namespace fracstar {

/// Solution ansatz on the star graph:
///   u_k(x) = b x^{beta-1} / Gamma(beta) + (I^beta_{0,x} phi_k)(x),
/// so phi_k is the beta-order Caputo derivative of u_k and b is the shared
/// (1-beta)-trace at the central vertex. The pair (b, phi) is the unknown;
/// node values are derived quantities.
struct SingularRepresentation {
  StarGraph graph;
  FracOrder beta;
  double vertex_coeff;  // b
  GraphSeries density;  // phi

  SingularRepresentation(StarGraph graph, FracOrder beta, double vertex_coeff,
                         GraphSeries density);
  static SingularRepresentation zeros(const StarGraph& graph, FracOrder beta);
};

/// Node values of a representation. The x^{beta-1} part blows up at the
/// central vertex, so node 0 of every edge carries the regular part only and
/// singular_at_vertex records whether a singular part was dropped there.
struct GraphValues {
  GraphSeries values;
  bool singular_at_vertex;
};

GraphValues node_values(const SingularRepresentation& u);

/// Regular part I^beta_{0,x} phi_k per edge (node values without the
/// singular term).
GraphSeries regular_part(const SingularRepresentation& u);

/// int_Gamma (b1 x^{beta-1}/Gamma(beta) + r1)(b2 x^{beta-1}/Gamma(beta) + r2).
/// The singular x singular part integrates in closed form
/// (l^{2beta-1}/((2beta-1) Gamma(beta)^2), finite for beta > 1/2), the cross
/// terms go through singular_quadrature, regular x regular through trapezoid.
double singular_pair_integral(double b1, const GraphSeries& r1, double b2,
                              const GraphSeries& r2, FracOrder beta);

/// L u = D^beta_{x,l}(gamma_k phi_k) per edge (right Caputo of the flux
/// density). The singular part of u never enters: its beta-derivative is the
/// constant b absorbed into phi by the ansatz.
GraphSeries apply_L(const SingularRepresentation& u, const Coefficients& coeff);

/// Vertex system P mu = M for mu = (b, a_1, ..., a_n): row 0 is the flux
/// balance at the central vertex, row k couples b with the edge-k constant
/// a_k through the boundary condition at the outer vertex.
struct VertexSystem {
  Eigen::MatrixXd P;
  Eigen::VectorXd M;
};

VertexSystem assemble_vertex_system(const GraphSeries& omega,
                                    const Coefficients& coeff, FracOrder beta);

/// det P = -sum_k prod_{j != k} c_j with c_j = int_0^{l_j} dx / gamma_j.
/// Strictly negative for admissible coefficients.
double det_P_closed_form(const Coefficients& coeff);

/// Solve L u = omega with the vertex conditions: continuity of the
/// (1-beta)-trace, flux balance, zero trace at the outer vertices.
SingularRepresentation invert_L(const GraphSeries& omega,
                                const Coefficients& coeff, FracOrder beta);

/// Factored form of (d I + L) with the vertex conditions, for the implicit
/// time stepper. Assemble once per time grid, solve once per step.
struct SteppingOperator {
  double d;
  FracOrder beta;
  Coefficients coeff;
  std::vector<std::size_t> offset;  // unknowns: [b, phi_0 nodes, phi_1 nodes, ...]
  std::size_t dimension;
  double condition_estimate;  // reciprocal 1-norm condition from the LU
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  // Per-edge right integral: the equation rows are stated in integrated
  // form (differences of the right integral between adjacent nodes), so the
  // rhs of a solve is transformed by the same rows.
  std::vector<Eigen::MatrixXd> right_integral;
  // Per-edge right integral of the vertex profile x^{beta-1}/Gamma(beta),
  // exact near the vertex where sampling the profile would lose accuracy.
  std::vector<Eigen::VectorXd> vertex_profile_integral;
};

SteppingOperator assemble_stepping(double d, const Coefficients& coeff,
                                   FracOrder beta);

/// Solve (d I + L) u = rhs for the representation u, where
/// rhs(x) = rhs_regular(x) + rhs_singular x^{beta-1}/Gamma(beta) on every
/// edge. Splitting the rhs matters: the L1 history of previous steps
/// carries the singular vertex profile, whose right integral must be taken
/// exactly rather than through the sampled quadrature rows.
SingularRepresentation stepping_solve(const SteppingOperator& op,
                                      const GraphSeries& rhs_regular,
                                      double rhs_singular = 0.0);

}  // namespace fracstar
