#include "fracstar/verify.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "fracstar/format.hpp"

namespace fracstar {

namespace {

double unit_draw(std::mt19937_64& rng) {
  // 53 uniform mantissa bits; avoids distribution-dependent rounding.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

UniformGrid refine(const UniformGrid& g, std::size_t factor) {
  return UniformGrid(g.length, g.intervals * factor);
}

StarGraph refine(const StarGraph& graph, std::size_t factor) {
  std::vector<UniformGrid> edges;
  edges.reserve(graph.edge_count());
  for (const UniformGrid& g : graph.edges) edges.push_back(refine(g, factor));
  return StarGraph(std::move(edges));
}

Series sample(const std::function<double(double)>& f, const UniformGrid& g) {
  Series s = Series::zeros(g);
  for (std::size_t i = 0; i < g.node_count(); ++i) s[i] = f(g.node(i));
  return s;
}

Series restrict_to(const Series& fine, const UniformGrid& coarse,
                   std::size_t factor) {
  Series s = Series::zeros(coarse);
  for (std::size_t i = 0; i < coarse.node_count(); ++i) {
    s[i] = fine[i * factor];
  }
  return s;
}

// Discrete trapezoid of a polynomial on the edge grid; used instead of the
// exact integral so the conforming rows hold to machine precision on the
// grid the solver actually sees.
double discrete_integral(const EdgePoly& p, const UniformGrid& g) {
  const std::vector<double> w = trapezoid_weights(g);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * p(g.node(i));
  return acc;
}

}  // namespace

Coefficients CoefficientField::sample(const StarGraph& graph) const {
  GraphSeries g = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const UniformGrid& e = graph.edge(k);
    for (std::size_t i = 0; i < e.node_count(); ++i) {
      g.edge(k)[i] = gamma(k, e.node(i));
    }
  }
  return Coefficients(std::move(g), p1, p2);
}

double EdgePoly::operator()(double x) const {
  double acc = 0.0;
  for (std::size_t p = c.size(); p-- > 0;) acc = acc * x + c[p];
  return acc;
}

std::vector<EdgePoly> random_edge_polys(const StarGraph& graph,
                                        std::uint64_t seed, int degree,
                                        double span) {
  if (degree < 0) throw std::invalid_argument("negative polynomial degree");
  std::mt19937_64 rng(seed);
  std::vector<EdgePoly> out(graph.edge_count());
  for (EdgePoly& p : out) {
    p.c.resize(static_cast<std::size_t>(degree) + 1);
    for (double& c : p.c) c = span * (2.0 * unit_draw(rng) - 1.0);
  }
  return out;
}

GraphSeries SpatialProfile::sample_phi(const StarGraph& graph) const {
  if (phi.size() != graph.edge_count()) {
    throw std::invalid_argument("profile edge count mismatch");
  }
  GraphSeries out = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const UniformGrid& g = graph.edge(k);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      out.edge(k)[i] = phi[k](g.node(i));
    }
  }
  return out;
}

GraphSeries SpatialProfile::exact_regular(const StarGraph& graph,
                                          FracOrder beta) const {
  if (phi.size() != graph.edge_count()) {
    throw std::invalid_argument("profile edge count mismatch");
  }
  const double bv = beta.value();
  GraphSeries out = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const UniformGrid& g = graph.edge(k);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const double x = g.node(i);
      double acc = 0.0;
      // I^beta x^p = Gamma(p+1)/Gamma(p+1+beta) x^{p+beta}, per monomial.
      for (std::size_t p = 0; p < phi[k].c.size(); ++p) {
        const double pp = static_cast<double>(p);
        acc += phi[k].c[p] * gamma_fn(pp + 1.0) / gamma_fn(pp + 1.0 + bv) *
               std::pow(x, pp + bv);
      }
      out.edge(k)[i] = acc;
    }
  }
  return out;
}

SpatialProfile conforming_profile(const StarGraph& graph,
                                  const std::vector<double>& gamma0,
                                  const std::vector<EdgePoly>& raw) {
  const std::size_t n = graph.edge_count();
  if (gamma0.size() != n || raw.size() != n) {
    throw std::invalid_argument("conforming_profile: edge count mismatch");
  }
  // Shift each density by a constant so the boundary row b + int phi_k = 0
  // holds; pick b so the shifted densities balance the flux at the vertex.
  double num = 0.0;
  double den = 0.0;
  std::vector<double> integral(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double l = graph.edge(k).length;
    integral[k] = discrete_integral(raw[k], graph.edge(k));
    num += gamma0[k] * (raw[k](0.0) - integral[k] / l);
    den += gamma0[k] / l;
  }
  SpatialProfile out;
  out.b = num / den;
  out.phi = raw;
  for (std::size_t k = 0; k < n; ++k) {
    const double shift = (-out.b - integral[k]) / graph.edge(k).length;
    if (out.phi[k].c.empty()) out.phi[k].c.push_back(0.0);
    out.phi[k].c[0] += shift;
  }
  return out;
}

SpatialProfile boundary_profile(const StarGraph& graph, double b,
                                const std::vector<EdgePoly>& raw) {
  const std::size_t n = graph.edge_count();
  if (raw.size() != n) {
    throw std::invalid_argument("boundary_profile: edge count mismatch");
  }
  SpatialProfile out;
  out.b = b;
  out.phi = raw;
  for (std::size_t k = 0; k < n; ++k) {
    const double integral = discrete_integral(raw[k], graph.edge(k));
    const double shift = (-b - integral) / graph.edge(k).length;
    if (out.phi[k].c.empty()) out.phi[k].c.push_back(0.0);
    out.phi[k].c[0] += shift;
  }
  return out;
}

double ManufacturedDirect::tau(double t) const {
  return std::pow(t, sigma);
}

double ManufacturedDirect::dtau(double t) const {
  const double a = problem.alpha.value();
  return gamma_fn(sigma + 1.0) / gamma_fn(sigma + 1.0 - a) *
         std::pow(t, sigma - a);
}

ManufacturedDirect manufactured_direct_from(const StarGraph& graph,
                                            const CoefficientField& field,
                                            FracOrder alpha, FracOrder beta,
                                            double sigma, TimeGrid time,
                                            SpatialProfile profile) {
  if (!(sigma >= 2.0)) {
    throw std::invalid_argument(
        "time profile exponent must be >= 2 to keep the L1 scheme at full "
        "order");
  }
  Coefficients coeff = field.sample(graph);
  GraphSeries exact_reg = profile.exact_regular(graph, beta);
  GraphSeries lu = refined_apply_L(
      [&profile](std::size_t k, double x) { return profile.phi[k](x); },
      field, graph, beta, 8);

  // The forcing splits like the solution: h = dtau (b s + u_reg) + tau L u
  // with s the vertex profile. The regular part is sampled nodally; the
  // singular coefficient dtau(t) b rides the dedicated source channel so
  // the solver integrates the profile exactly.
  auto reg_nodes = std::make_shared<GraphSeries>(exact_reg);
  auto lu_nodes = std::make_shared<GraphSeries>(lu);

  const double a = alpha.value();
  const double b = profile.b;
  const double dtau_scale = gamma_fn(sigma + 1.0) / gamma_fn(sigma + 1.0 - a);
  SpaceTimeField h = [reg_nodes, lu_nodes, graph, sigma, a,
                      dtau_scale](std::size_t k, double x, double t) {
    const UniformGrid& g = graph.edge(k);
    const std::size_t i =
        static_cast<std::size_t>(std::llround(x / g.spacing()));
    return dtau_scale * std::pow(t, sigma - a) * reg_nodes->edge(k)[i] +
           std::pow(t, sigma) * lu_nodes->edge(k)[i];
  };

  DirectProblem problem(std::move(coeff), alpha, beta, time, std::move(h));
  problem.source_singular = [sigma, a, dtau_scale, b](double t) {
    return dtau_scale * std::pow(t, sigma - a) * b;
  };
  return ManufacturedDirect{std::move(problem), sigma, std::move(profile),
                            std::move(exact_reg), std::move(lu)};
}

ManufacturedDirect manufactured_direct(const StarGraph& graph,
                                       const CoefficientField& field,
                                       FracOrder alpha, FracOrder beta,
                                       double sigma, TimeGrid time,
                                       std::uint64_t seed) {
  std::vector<double> gamma0(graph.edge_count());
  for (std::size_t k = 0; k < gamma0.size(); ++k) {
    gamma0[k] = field.gamma(k, 0.0);
  }
  const std::vector<EdgePoly> raw = random_edge_polys(graph, seed);
  SpatialProfile profile = conforming_profile(graph, gamma0, raw);
  return manufactured_direct_from(graph, field, alpha, beta, sigma, time,
                                  std::move(profile));
}

double manufactured_error(const ManufacturedDirect& md,
                          const DirectSolution& sol) {
  const FracOrder beta = md.problem.beta;
  const double dt = sol.time.dt();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t m = 1; m <= sol.time.steps; ++m) {
    const double s = md.tau(sol.time.node(m));
    GraphSeries ex_reg = md.exact_reg;
    graph_scale(s, ex_reg);
    const double ex_b = s * md.profile.b;
    den += dt * singular_pair_integral(ex_b, ex_reg, ex_b, ex_reg, beta);

    GraphSeries diff_reg = regular_part(sol.steps[m]);
    graph_axpy(-1.0, ex_reg, diff_reg);
    const double diff_b = sol.steps[m].vertex_coeff - ex_b;
    num += dt * singular_pair_integral(diff_b, diff_reg, diff_b, diff_reg,
                                       beta);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

ManufacturedInverse manufactured_inverse(
    const StarGraph& graph, const CoefficientField& field, FracOrder alpha,
    FracOrder beta, const TimeSeries& f_true, std::uint64_t seed,
    std::function<double(double)> f_fine) {
  const TimeGrid time = f_true.grid;
  Coefficients coeff = field.sample(graph);

  const std::vector<EdgePoly> eta_raw =
      random_edge_polys(graph, seed * 2 + 1);
  const double b_eta = 1.0;
  const SpatialProfile eta_prof = boundary_profile(graph, b_eta, eta_raw);
  SingularRepresentation eta(graph, beta, b_eta, eta_prof.sample_phi(graph));

  // Static g profile; shift until the overdetermination moment g* is safely
  // away from zero (q > 0 of condition K1).
  std::vector<EdgePoly> g_polys = random_edge_polys(graph, seed * 2 + 2);
  double g_star_val = 0.0;
  for (int attempt = 0; attempt < 16; ++attempt) {
    GraphSeries g_vals = GraphSeries::zeros(graph);
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
      const UniformGrid& g = graph.edge(k);
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        g_vals.edge(k)[i] = g_polys[k](g.node(i));
      }
    }
    g_star_val = overdetermination_moment(eta, g_vals);
    if (std::abs(g_star_val) >= 0.1) break;
    for (EdgePoly& p : g_polys) p.c[0] += 0.75;
  }
  if (std::abs(g_star_val) < 0.1) {
    throw std::runtime_error("could not shift g away from g* = 0");
  }

  SpaceTimeField g_eval = [g_polys](std::size_t k, double x, double t) {
    (void)t;
    return g_polys[k](x);
  };

  // Reference state at twice the resolution in space and time.
  const StarGraph fine_graph = refine(graph, 2);
  const TimeGrid fine_time(time.horizon, time.steps * 2);
  const SpatialProfile eta_fine_prof =
      boundary_profile(fine_graph, b_eta, eta_raw);
  const SingularRepresentation eta_fine(
      fine_graph, beta, b_eta, eta_fine_prof.sample_phi(fine_graph));

  std::vector<double> f_at_fine(fine_time.node_count());
  for (std::size_t m = 0; m < f_at_fine.size(); ++m) {
    if (f_fine) {
      f_at_fine[m] = f_fine(fine_time.node(m));
    } else if (m % 2 == 0) {
      f_at_fine[m] = f_true[m / 2];
    } else {
      f_at_fine[m] = 0.5 * (f_true[(m - 1) / 2] + f_true[(m + 1) / 2]);
    }
  }
  const double fine_dt = fine_time.dt();
  SpaceTimeField fine_source = [g_polys, f_at_fine,
                                fine_dt](std::size_t k, double x, double t) {
    const std::size_t m =
        static_cast<std::size_t>(std::llround(t / fine_dt));
    return f_at_fine[m] * g_polys[k](x);
  };
  const DirectProblem fine_problem(field.sample(fine_graph), alpha, beta,
                                   fine_time, fine_source);
  const DirectSolution z_ref = solve_direct(fine_problem);

  TimeSeries psi = TimeSeries::zeros(time);
  for (std::size_t m = 0; m <= time.steps; ++m) {
    psi[m] = overdetermination_moment(z_ref.steps[2 * m], eta_fine);
  }

  InverseProblem problem(std::move(coeff), alpha, beta, time,
                         std::move(g_eval), SpaceTimeField{}, std::move(eta),
                         std::move(psi));
  return ManufacturedInverse{std::move(problem), f_true};
}

ConvergenceTable convergence_study(
    const LevelError& family,
    const std::vector<std::pair<std::size_t, std::size_t>>& levels) {
  if (levels.size() < 3) {
    throw std::invalid_argument("convergence study needs at least 3 levels");
  }
  for (std::size_t l = 1; l < levels.size(); ++l) {
    const auto [pn, pm] = levels[l - 1];
    const auto [cn, cm] = levels[l];
    const bool n_ok = cn == pn || cn == 2 * pn;
    const bool m_ok = cm == pm || cm == 2 * pm;
    if (!n_ok || !m_ok || (cn == pn && cm == pm)) {
      throw std::invalid_argument(
          "levels must refine by doubling N, M, or both");
    }
  }
  ConvergenceTable table;
  table.monotone = true;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    ConvergenceLevel lev{levels[l].first, levels[l].second,
                         family(levels[l].first, levels[l].second), 0.0,
                         false};
    if (l > 0) {
      const double prev = table.levels.back().error;
      if (prev > 0.0 && lev.error > 0.0) {
        lev.observed_order = std::log2(prev / lev.error);
        lev.order_defined = true;
      }
      if (!(lev.error < prev)) table.monotone = false;
    }
    table.levels.push_back(lev);
  }
  return table;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::string out = "N,M,error,order\n";
  for (const ConvergenceLevel& l : table.levels) {
    out += std::to_string(l.intervals) + "," + std::to_string(l.steps) + "," +
           format_double(l.error) + ",";
    out += l.order_defined ? format_double(l.observed_order) : "na";
    out += "\n";
  }
  return out;
}

Series refined_frac_integral(const std::function<double(double)>& f,
                             const UniformGrid& grid, FracOrder mu, Side side,
                             std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("refinement factor == 0");
  const UniformGrid fine = refine(grid, factor);
  return restrict_to(frac_integral(sample(f, fine), mu, side), grid, factor);
}

Series refined_caputo_derivative(const std::function<double(double)>& f,
                                 const UniformGrid& grid, FracOrder mu,
                                 Side side, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("refinement factor == 0");
  const UniformGrid fine = refine(grid, factor);
  return restrict_to(caputo_derivative(sample(f, fine), mu, side), grid,
                     factor);
}

GraphSeries refined_apply_L(
    const std::function<double(std::size_t, double)>& phi,
    const CoefficientField& field, const StarGraph& graph, FracOrder beta,
    std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("refinement factor == 0");
  // The flux gamma phi of a smooth density is smooth, so the pointwise L1
  // form of the right derivative converges at full order here. Inverting
  // the right integral instead (what apply_L does, correctly, for solver
  // output whose flux carries the (l-x)^beta boundary profile) would leak
  // the anchor closure error of the smooth-data case into the oracle.
  const StarGraph fine = refine(graph, factor);
  GraphSeries out = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const UniformGrid& g = fine.edge(k);
    Series flux = Series::zeros(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      flux[i] = field.gamma(k, g.node(i)) * phi(k, g.node(i));
    }
    out.edge(k) = restrict_to(caputo_derivative(flux, beta, Side::Right),
                              graph.edge(k), factor);
  }
  return out;
}

double refined_singular_quadrature(const std::function<double(double)>& f,
                                   const UniformGrid& grid, FracOrder beta,
                                   std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("refinement factor == 0");
  return singular_quadrature(sample(f, refine(grid, factor)), beta);
}

}  // namespace fracstar
