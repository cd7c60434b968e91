#include "fracstar/spatial.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracstar {

namespace {

void require_graph_match(const GraphSeries& f, const StarGraph& graph,
                         const char* what) {
  if (!(f.graph == graph)) {
    throw std::invalid_argument(std::string(what) +
                                ": series lives on a different graph");
  }
}

void require_finite(const GraphSeries& f, const char* what) {
  for (const Series& e : f.edges) {
    for (double v : e.values) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) +
                                    ": non-finite nodal value");
      }
    }
  }
}

// Discrete right-sided derivative of order beta, defined as the inverse of
// the product-trapezoid right integral: solve W_r omega = F - F(l) for
// omega at nodes 0..N-1 (the anchor row of W_r is trivial) and close the
// anchor value by second-order extrapolation. Inverting the integral
// instead of differencing an interpolant keeps the (l-x)^beta leading
// behaviour of integral images exact, which the pointwise L1 formula
// cannot: its error at the nodes next to the anchor does not vanish with h.
Series solve_right_integral(const Series& flux, FracOrder beta) {
  const std::size_t n = flux.grid.intervals;
  const Eigen::MatrixXd w = frac_integral_matrix(flux.grid, beta, Side::Right);
  Series out = Series::zeros(flux.grid);

  // Coefficient of omega_j in row i after eliminating omega_N through the
  // closure omega_N = 2 omega_{N-1} - omega_{N-2}.
  const auto coeff = [&](std::size_t i, std::size_t j) {
    double c = w(i, j);
    if (j == n - 1) c += 2.0 * w(i, n);
    if (j == n - 2) c -= w(i, n);
    return c;
  };
  const auto rhs = [&](std::size_t i) { return flux[i] - flux[n]; };

  // Rows N-2 and N-1 couple through the closure; solve them as a 2x2 block,
  // then back-substitute the strictly triangular remainder.
  const double a11 = coeff(n - 2, n - 2);
  const double a12 = coeff(n - 2, n - 1);
  const double a21 = coeff(n - 1, n - 2);
  const double a22 = coeff(n - 1, n - 1);
  const double det = a11 * a22 - a12 * a21;
  if (!std::isfinite(det) || det == 0.0) {
    throw std::runtime_error("right integral inversion: singular anchor block");
  }
  const double b1 = rhs(n - 2);
  const double b2 = rhs(n - 1);
  out[n - 2] = (b1 * a22 - b2 * a12) / det;
  out[n - 1] = (a11 * b2 - a21 * b1) / det;
  for (std::size_t r = n - 2; r-- > 0;) {
    double s = rhs(r);
    for (std::size_t j = r + 1; j <= n - 1; ++j) s -= coeff(r, j) * out[j];
    out[r] = s / coeff(r, r);
  }
  out[n] = 2.0 * out[n - 1] - out[n - 2];
  return out;
}

// Nodal values of q(x) = I^beta_{x,l} s with s(x) = x^{beta-1}/Gamma(beta),
// the vertex profile. Sampling s and applying the product-trapezoid rows of
// wr is fine on the outer half of the edge where s is smooth, but loses
// O(h^{1/2}) near the vertex. There the exact reduction
//   q(x) = x^{2 beta - 1} G(l/x) / Gamma(beta)^2,
//   G(z) = int_1^z (sigma - 1)^{beta-1} sigma^{beta-1} dsigma
// applies, with G evaluated by geometrically convergent series for z >= 2,
// which is exactly the inner half x <= l/2. Needs beta > 1/2 so that q(0)
// is finite.
Eigen::VectorXd singular_right_integral(const UniformGrid& grid,
                                        FracOrder beta,
                                        const Eigen::MatrixXd& wr) {
  const double b = beta.value();
  const double gb = gamma_fn(b);
  const double l = grid.length;
  const std::size_t n = grid.intervals;

  // K = G(2) = int_0^{1/2} t^{beta-1} (1-t)^{-2 beta} dt after the Moebius
  // substitution sigma = 1/(1-t); the Pochhammer series in t converges
  // geometrically.
  double K = 0.0;
  double c = 1.0;  // (2 beta)_j / j!
  for (int j = 0; j < 200; ++j) {
    const double term = c * std::pow(0.5, b + j) / (b + j);
    K += term;
    if (term < 1e-17 * K) break;
    c *= (2.0 * b + j) / (j + 1);
  }

  // Tail of G past sigma = 2: expand (1 - 1/sigma)^{beta-1} binomially.
  const auto tail = [&](double z) {
    double acc = K;
    double t = 1.0;  // |binom(beta-1, j)|
    for (int j = 0; j < 400; ++j) {
      const double p = 2.0 * b - 1.0 - j;
      const double term = t * (std::pow(z, p) - std::pow(2.0, p)) / p;
      acc += term;
      if (j > 1 && std::abs(term) < 1e-17 * std::abs(acc)) break;
      t *= (j + 1.0 - b) / (j + 1.0);
    }
    return acc;
  };

  Eigen::VectorXd q = Eigen::VectorXd::Zero(n + 1);
  q(0) = std::pow(l, 2.0 * b - 1.0) / ((2.0 * b - 1.0) * gb * gb);
  for (std::size_t i = 1; i < n; ++i) {
    const double x = grid.node(i);
    if (2.0 * x <= l) {
      q(i) = std::pow(x, 2.0 * b - 1.0) * tail(l / x) / (gb * gb);
    } else {
      double acc = 0.0;
      for (std::size_t j = i; j <= n; ++j) {
        acc += wr(i, j) * std::pow(grid.node(j), b - 1.0) / gb;
      }
      q(i) = acc;
    }
  }
  return q;
}

// int_0^{l_k} dx / gamma_k, trapezoid.
std::vector<double> resistances(const Coefficients& coeff) {
  std::vector<double> c(coeff.graph().edge_count());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Series& g = coeff.gamma.edge(k);
    Series inv = Series::zeros(g.grid);
    for (std::size_t i = 0; i < g.size(); ++i) inv[i] = 1.0 / g[i];
    c[k] = trapezoid(inv);
  }
  return c;
}

}  // namespace

SingularRepresentation::SingularRepresentation(StarGraph graph_,
                                               FracOrder beta_,
                                               double vertex_coeff_,
                                               GraphSeries density_)
    : graph(std::move(graph_)),
      beta(beta_),
      vertex_coeff(vertex_coeff_),
      density(std::move(density_)) {
  if (!(density.graph == graph)) {
    throw std::invalid_argument("representation density graph mismatch");
  }
  if (!std::isfinite(vertex_coeff)) {
    throw std::invalid_argument("vertex coefficient must be finite");
  }
}

SingularRepresentation SingularRepresentation::zeros(const StarGraph& graph,
                                                     FracOrder beta) {
  return SingularRepresentation(graph, beta, 0.0, GraphSeries::zeros(graph));
}

GraphSeries regular_part(const SingularRepresentation& u) {
  GraphSeries out = GraphSeries::zeros(u.graph);
  for (std::size_t k = 0; k < u.graph.edge_count(); ++k) {
    out.edge(k) = frac_integral(u.density.edge(k), u.beta, Side::Left);
  }
  return out;
}

GraphValues node_values(const SingularRepresentation& u) {
  const double b = u.vertex_coeff;
  const double beta = u.beta.value();
  const double gb = gamma_fn(beta);
  GraphSeries out = regular_part(u);
  for (std::size_t k = 0; k < u.graph.edge_count(); ++k) {
    const UniformGrid& g = u.graph.edge(k);
    Series& e = out.edge(k);
    for (std::size_t i = 1; i < g.node_count(); ++i) {
      e[i] += b * std::pow(g.node(i), beta - 1.0) / gb;
    }
  }
  return GraphValues{std::move(out), b != 0.0};
}

double singular_pair_integral(double b1, const GraphSeries& r1, double b2,
                              const GraphSeries& r2, FracOrder beta) {
  if (!(beta.value() > 0.5)) {
    throw std::domain_error(
        "singular pair integral needs beta > 1/2 for integrability");
  }
  if (!(r1.graph == r2.graph)) {
    throw std::invalid_argument("singular_pair_integral: graph mismatch");
  }
  const double bv = beta.value();
  const double gb = gamma_fn(bv);
  double acc = 0.0;
  for (std::size_t k = 0; k < r1.edge_count(); ++k) {
    const double l = r1.edge(k).grid.length;
    acc += b1 * b2 * std::pow(l, 2.0 * bv - 1.0) /
           ((2.0 * bv - 1.0) * gb * gb);
  }
  if (b1 != 0.0) {
    for (const Series& e : r2.edges) {
      acc += b1 / gb * singular_quadrature(e, beta);
    }
  }
  if (b2 != 0.0) {
    for (const Series& e : r1.edges) {
      acc += b2 / gb * singular_quadrature(e, beta);
    }
  }
  acc += graph_inner(r1, r2);
  return acc;
}

GraphSeries apply_L(const SingularRepresentation& u,
                    const Coefficients& coeff) {
  require_graph_match(u.density, coeff.graph(), "apply_L");
  GraphSeries out = GraphSeries::zeros(u.graph);
  for (std::size_t k = 0; k < u.graph.edge_count(); ++k) {
    const Series& phi = u.density.edge(k);
    const Series& gam = coeff.gamma.edge(k);
    Series flux = Series::zeros(phi.grid);
    for (std::size_t i = 0; i < phi.size(); ++i) flux[i] = gam[i] * phi[i];
    out.edge(k) = solve_right_integral(flux, u.beta);
  }
  return out;
}

VertexSystem assemble_vertex_system(const GraphSeries& omega,
                                    const Coefficients& coeff,
                                    FracOrder beta) {
  require_graph_match(omega, coeff.graph(), "assemble_vertex_system");
  require_finite(omega, "assemble_vertex_system");
  const std::size_t n = coeff.graph().edge_count();
  const std::vector<double> c = resistances(coeff);

  VertexSystem sys;
  sys.P = Eigen::MatrixXd::Zero(n + 1, n + 1);
  sys.M = Eigen::VectorXd::Zero(n + 1);

  // Row 0, flux balance: sum_k gamma_k(0) phi_k(0) = 0 with
  // gamma_k(0) phi_k(0) = (I^beta_{x,l} omega_k)(0) + a_k.
  for (std::size_t k = 0; k < n; ++k) sys.P(0, k + 1) = 1.0;

  for (std::size_t k = 0; k < n; ++k) {
    const Series w = frac_integral(omega.edge(k), beta, Side::Right);
    sys.M(0) -= w[0];

    // Row k+1, outer boundary of edge k: b + int phi_k = 0 with
    // phi_k = ((I^beta_{x,l} omega_k) + a_k) / gamma_k.
    const Series& gam = coeff.gamma.edge(k);
    Series ratio = Series::zeros(w.grid);
    for (std::size_t i = 0; i < w.size(); ++i) ratio[i] = w[i] / gam[i];
    sys.P(k + 1, 0) = 1.0;
    sys.P(k + 1, k + 1) = c[k];
    sys.M(k + 1) = -trapezoid(ratio);
  }
  return sys;
}

double det_P_closed_form(const Coefficients& coeff) {
  const std::vector<double> c = resistances(coeff);
  double det = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    double prod = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j != k) prod *= c[j];
    }
    det -= prod;
  }
  return det;
}

SingularRepresentation invert_L(const GraphSeries& omega,
                                const Coefficients& coeff, FracOrder beta) {
  const VertexSystem sys = assemble_vertex_system(omega, coeff, beta);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.P);
  const double det = lu.determinant();
  const double scale = sys.P.cwiseAbs().maxCoeff();
  const std::size_t n = coeff.graph().edge_count();
  if (!std::isfinite(det) ||
      std::abs(det) < 1e-14 * std::pow(scale, static_cast<double>(n + 1))) {
    throw std::runtime_error("vertex system is singular, det = " +
                             std::to_string(det));
  }
  const Eigen::VectorXd mu = lu.solve(sys.M);

  GraphSeries phi = GraphSeries::zeros(omega.graph);
  for (std::size_t k = 0; k < n; ++k) {
    const Series w = frac_integral(omega.edge(k), beta, Side::Right);
    const Series& gam = coeff.gamma.edge(k);
    Series& p = phi.edge(k);
    for (std::size_t i = 0; i < w.size(); ++i) {
      p[i] = (w[i] + mu(k + 1)) / gam[i];
    }
  }
  return SingularRepresentation(omega.graph, beta, mu(0), std::move(phi));
}

SteppingOperator assemble_stepping(double d, const Coefficients& coeff,
                                   FracOrder beta) {
  if (!(d >= 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("assemble_stepping requires d >= 0");
  }
  if (beta.value() <= 0.5) {
    throw std::invalid_argument(
        "assemble_stepping requires beta > 1/2: the vertex profile "
        "x^{beta-1} must have a finite right integral");
  }
  const StarGraph& graph = coeff.graph();
  const std::size_t n = graph.edge_count();

  SteppingOperator op{d, beta, coeff, {}, 0, 0.0, {}, {}, {}};
  op.offset.resize(n);
  std::size_t dim = 1;
  for (std::size_t k = 0; k < n; ++k) {
    op.offset[k] = dim;
    dim += graph.edge(k).node_count();
  }
  op.dimension = dim;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  std::size_t row = 0;

  for (std::size_t k = 0; k < n; ++k) {
    const UniformGrid& g = graph.edge(k);
    const Series& gam = coeff.gamma.edge(k);
    const std::size_t off = op.offset[k];
    const std::size_t nk = g.intervals;

    // Right integral of the equation between adjacent nodes: gamma phi
    // enters locally, d u and the rhs through differences of wr rows. This
    // keeps the system close to the d == 0 difference form, which is well
    // conditioned; collocating the derivative form instead is not an
    // option, because embedding the (stable) triangular inversion of the
    // right integral as a matrix block makes the stepping matrix nearly
    // singular.
    op.right_integral.push_back(frac_integral_matrix(g, beta, Side::Right));
    const Eigen::MatrixXd& wr = op.right_integral.back();
    op.vertex_profile_integral.push_back(
        singular_right_integral(g, beta, wr));
    if (d > 0.0) {
      const Eigen::MatrixXd ww =
          wr * frac_integral_matrix(g, beta, Side::Left);
      const Eigen::VectorXd& q = op.vertex_profile_integral.back();
      for (std::size_t i = 1; i <= nk; ++i, ++row) {
        a(row, 0) = d * (q(i) - q(i - 1));
        for (std::size_t j = 0; j <= nk; ++j) {
          a(row, off + j) = d * (ww(i, j) - ww(i - 1, j));
        }
        a(row, off + i) += gam[i];
        a(row, off + i - 1) -= gam[i - 1];
      }
    } else {
      // d == 0: gamma phi minus the right integral of the rhs is constant
      // along the edge, which is exactly the explicit inversion in
      // difference form.
      for (std::size_t i = 1; i <= nk; ++i, ++row) {
        a(row, off + i) = gam[i];
        a(row, off + i - 1) = -gam[i - 1];
      }
    }
  }

  // Outer boundary rows: b + int phi_k = 0.
  for (std::size_t k = 0; k < n; ++k, ++row) {
    const std::vector<double> tw = trapezoid_weights(graph.edge(k));
    a(row, 0) = 1.0;
    for (std::size_t j = 0; j < tw.size(); ++j) {
      a(row, op.offset[k] + j) = tw[j];
    }
  }

  // Flux balance at the central vertex.
  for (std::size_t k = 0; k < n; ++k) {
    a(row, op.offset[k]) = coeff.gamma.edge(k)[0];
  }
  ++row;

  op.lu.compute(a);
  op.condition_estimate = op.lu.rcond();
  if (!std::isfinite(op.condition_estimate) ||
      op.condition_estimate < 1e-14) {
    throw std::runtime_error(
        "stepping operator is numerically singular, rcond = " +
        std::to_string(op.condition_estimate));
  }
  return op;
}

SingularRepresentation stepping_solve(const SteppingOperator& op,
                                      const GraphSeries& rhs_regular,
                                      double rhs_singular) {
  require_graph_match(rhs_regular, op.coeff.graph(), "stepping_solve");
  require_finite(rhs_regular, "stepping_solve");
  if (!std::isfinite(rhs_singular)) {
    throw std::invalid_argument("stepping_solve: rhs_singular not finite");
  }
  const StarGraph& graph = op.coeff.graph();
  const std::size_t n = graph.edge_count();

  Eigen::VectorXd v = Eigen::VectorXd::Zero(op.dimension);
  std::size_t row = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t nk = graph.edge(k).intervals;
    const Eigen::MatrixXd& w = op.right_integral[k];
    const Eigen::VectorXd& q = op.vertex_profile_integral[k];
    Eigen::VectorXd f(nk + 1);
    for (std::size_t i = 0; i <= nk; ++i) f(i) = rhs_regular.edge(k)[i];
    const Eigen::VectorXd wf = w * f;
    for (std::size_t i = 1; i <= nk; ++i, ++row) {
      v(row) = wf(i) - wf(i - 1) + rhs_singular * (q(i) - q(i - 1));
    }
  }
  // Boundary and flux rows are homogeneous; v is already zero there.

  const Eigen::VectorXd x = op.lu.solve(v);
  GraphSeries phi = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < n; ++k) {
    Series& p = phi.edge(k);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = x(op.offset[k] + i);
    }
  }
  return SingularRepresentation(graph, op.beta, x(0), std::move(phi));
}

}  // namespace fracstar
