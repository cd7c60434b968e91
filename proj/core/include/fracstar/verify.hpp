#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fracstar/direct.hpp"
#include "fracstar/inverse.hpp"

namespace fracstar {

/// Coefficient given as a field (edge, x) -> gamma so that refined grids and
/// high-resolution reference runs can sample it consistently.
struct CoefficientField {
  std::function<double(std::size_t, double)> gamma;
  double p1;
  double p2;

  Coefficients sample(const StarGraph& graph) const;
};

/// Low-degree polynomial density on one edge.
struct EdgePoly {
  std::vector<double> c;  // c[p] x^p

  double operator()(double x) const;
};

/// Seeded polynomial densities, one per edge, degree <= `degree`.
/// Coefficients are drawn uniformly from [-span, span] with a fixed
/// generator, so results are reproducible across runs.
std::vector<EdgePoly> random_edge_polys(const StarGraph& graph,
                                        std::uint64_t seed, int degree = 3,
                                        double span = 1.0);

/// Exact spatial profile U(x) = b x^{beta-1}/Gamma(beta) + I^beta phi with
/// polynomial phi, conforming to the discrete boundary rows (trapezoid on
/// the given grids) to machine precision.
struct SpatialProfile {
  double b = 0.0;
  std::vector<EdgePoly> phi;

  GraphSeries sample_phi(const StarGraph& graph) const;
  /// Closed-form I^beta phi at the nodes (power rule per monomial).
  GraphSeries exact_regular(const StarGraph& graph, FracOrder beta) const;
};

/// Shift the raw densities edge-wise so every boundary row b + int phi_k = 0
/// holds AND the flux row sum_k gamma_k(0) phi_k(0) = 0 holds; b comes out
/// of the flux balance.
SpatialProfile conforming_profile(const StarGraph& graph,
                                  const std::vector<double>& gamma0,
                                  const std::vector<EdgePoly>& raw);

/// Boundary rows only (no flux condition), with the vertex coefficient
/// prescribed; used for the overdetermination weight eta.
SpatialProfile boundary_profile(const StarGraph& graph, double b,
                                const std::vector<EdgePoly>& raw);

/// Manufactured direct problem: exact solution tau(t) U(x) with
/// tau(t) = t^sigma; the source is assembled from the Caputo power rule and
/// an 8x-refined evaluation of L U (the oracle).
struct ManufacturedDirect {
  DirectProblem problem;
  double sigma;
  SpatialProfile profile;
  GraphSeries exact_reg;   // closed-form I^beta phi on the problem grid
  GraphSeries lu_oracle;   // refined L U restricted to the problem grid

  double tau(double t) const;
  double dtau(double t) const;  // Caputo derivative of tau at order alpha
};

ManufacturedDirect manufactured_direct(const StarGraph& graph,
                                       const CoefficientField& field,
                                       FracOrder alpha, FracOrder beta,
                                       double sigma, TimeGrid time,
                                       std::uint64_t seed);

/// Same construction from an explicit profile (e.g. the zero profile).
ManufacturedDirect manufactured_direct_from(const StarGraph& graph,
                                            const CoefficientField& field,
                                            FracOrder alpha, FracOrder beta,
                                            double sigma, TimeGrid time,
                                            SpatialProfile profile);

/// Relative L2(G_T) error of a solver run against the manufactured exact
/// solution (right-rectangle rule in time, singular-aware in space).
double manufactured_error(const ManufacturedDirect& md,
                          const DirectSolution& sol);

/// Manufactured inverse instance: static g profile, independent weight eta,
/// psi produced by a 2x-refined direct solve with source f_true * g, h = 0.
struct ManufacturedInverse {
  InverseProblem problem;
  TimeSeries f_true;
};

/// f_fine evaluates f_true off the coarse nodes for the refined reference
/// run; when empty, midpoint values are interpolated linearly.
ManufacturedInverse manufactured_inverse(
    const StarGraph& graph, const CoefficientField& field, FracOrder alpha,
    FracOrder beta, const TimeSeries& f_true, std::uint64_t seed,
    std::function<double(double)> f_fine = {});

struct ConvergenceLevel {
  std::size_t intervals;
  std::size_t steps;
  double error;
  double observed_order;  // meaningful only when order_defined
  bool order_defined;
};

struct ConvergenceTable {
  std::vector<ConvergenceLevel> levels;
  bool monotone;  // errors strictly decreasing across levels
};

/// family(N, M) returns the error at that resolution. Levels must refine
/// monotonically (each consecutive pair doubles N, M, or both).
using LevelError = std::function<double(std::size_t, std::size_t)>;

ConvergenceTable convergence_study(
    const LevelError& family,
    const std::vector<std::pair<std::size_t, std::size_t>>& levels);

/// CSV rows "N,M,error,order"; order column is "na" when undefined.
std::string convergence_csv(const ConvergenceTable& table);

/// Refined-grid oracles: evaluate the operator on a grid refined by
/// `factor` with the same quadrature family, restrict to the coarse nodes.
/// factor = 1 reproduces the direct evaluation exactly.
Series refined_frac_integral(const std::function<double(double)>& f,
                             const UniformGrid& grid, FracOrder mu, Side side,
                             std::size_t factor);
Series refined_caputo_derivative(const std::function<double(double)>& f,
                                 const UniformGrid& grid, FracOrder mu,
                                 Side side, std::size_t factor);
GraphSeries refined_apply_L(const std::function<double(std::size_t, double)>& phi,
                            const CoefficientField& field,
                            const StarGraph& graph, FracOrder beta,
                            std::size_t factor);
double refined_singular_quadrature(const std::function<double(double)>& f,
                                   const UniformGrid& grid, FracOrder beta,
                                   std::size_t factor);

}  // namespace fracstar
