#include "fracstar/direct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracstar {

DirectProblem::DirectProblem(Coefficients coeff_, FracOrder alpha_,
                             FracOrder beta_, TimeGrid time_,
                             SpaceTimeField source_)
    : coeff(std::move(coeff_)),
      alpha(alpha_),
      beta(beta_),
      time(time_),
      source(std::move(source_)) {
  if (!(beta.value() > 0.5)) {
    throw std::domain_error("direct problem requires beta > 1/2");
  }
}

DirectSolution solve_direct_prefactored(
    const SteppingOperator& op, FracOrder alpha, TimeGrid time,
    const std::vector<GraphSeries>& source_at,
    const std::vector<double>& singular_at) {
  const std::size_t steps = time.steps;
  if (source_at.size() != steps + 1) {
    throw std::invalid_argument("source_at needs one entry per time node");
  }
  if (!singular_at.empty() && singular_at.size() != steps + 1) {
    throw std::invalid_argument("singular_at needs one entry per time node");
  }
  const double dt = time.dt();
  const double av = alpha.value();
  const double d0 = std::pow(dt, -av) / gamma_fn(2.0 - av);
  const std::vector<double> a = caputo_weights(av, steps);
  const StarGraph& graph = op.coeff.graph();

  DirectSolution sol{time, {}, {}, {}};
  sol.steps.reserve(steps + 1);
  sol.values.reserve(steps + 1);
  sol.steps.push_back(SingularRepresentation::zeros(graph, op.beta));
  sol.values.push_back(GraphSeries::zeros(graph));
  sol.diagnostics.condition_estimate = op.condition_estimate;

  // History carries the singular vertex profile of each step separately
  // from the regular part, so the stepping rhs can integrate it exactly.
  std::vector<GraphSeries> regular(1, GraphSeries::zeros(graph));
  regular.reserve(steps + 1);

  for (std::size_t m = 1; m <= steps; ++m) {
    GraphSeries rhs = source_at[m];
    double rhs_b = singular_at.empty() ? 0.0 : singular_at[m];
    // L1 history: zero initial data kills the a_{m-1} u^0 term.
    for (std::size_t j = 1; j < m; ++j) {
      const double c = d0 * (a[j - 1] - a[j]);
      graph_axpy(c, regular[m - j], rhs);
      rhs_b += c * sol.steps[m - j].vertex_coeff;
    }

    for (const Series& e : rhs.edges) {
      for (double v : e.values) {
        sol.diagnostics.max_rhs_inf =
            std::max(sol.diagnostics.max_rhs_inf, std::abs(v));
      }
    }

    SingularRepresentation u = stepping_solve(op, rhs, rhs_b);

    double flux = 0.0;
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
      flux += op.coeff.gamma.edge(k)[0] * u.density.edge(k)[0];
      const double bres =
          std::abs(u.vertex_coeff + trapezoid(u.density.edge(k)));
      sol.diagnostics.max_boundary_residual =
          std::max(sol.diagnostics.max_boundary_residual, bres);
    }
    sol.diagnostics.max_flux_residual =
        std::max(sol.diagnostics.max_flux_residual, std::abs(flux));

    regular.push_back(regular_part(u));
    sol.values.push_back(node_values(u).values);
    sol.steps.push_back(std::move(u));
  }
  return sol;
}

DirectSolution solve_direct(const DirectProblem& p) {
  const double dt = p.time.dt();
  const double d0 =
      std::pow(dt, -p.alpha.value()) / gamma_fn(2.0 - p.alpha.value());
  const SteppingOperator op = assemble_stepping(d0, p.coeff, p.beta);

  const StarGraph& graph = p.graph();
  std::vector<GraphSeries> source_at(p.time.steps + 1,
                                     GraphSeries::zeros(graph));
  if (p.source) {
    for (std::size_t m = 1; m <= p.time.steps; ++m) {
      const double t = p.time.node(m);
      for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const UniformGrid& g = graph.edge(k);
        Series& e = source_at[m].edge(k);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
          e[i] = p.source(k, g.node(i), t);
        }
      }
    }
  }
  std::vector<double> singular_at;
  if (p.source_singular) {
    singular_at.assign(p.time.steps + 1, 0.0);
    for (std::size_t m = 1; m <= p.time.steps; ++m) {
      singular_at[m] = p.source_singular(p.time.node(m));
    }
  }
  return solve_direct_prefactored(op, p.alpha, p.time, source_at, singular_at);
}

namespace {

// L1 combination of stored representations at step m: the discrete Caputo
// derivative of a linear-in-(b, phi) history is again a representation.
SingularRepresentation l1_derivative_at(const DirectSolution& sol,
                                        const std::vector<double>& a,
                                        double d0, std::size_t m) {
  const StarGraph& graph = sol.steps[0].graph;
  double b = 0.0;
  GraphSeries phi = GraphSeries::zeros(graph);
  for (std::size_t j = 0; j < m; ++j) {
    const double c = d0 * a[j];
    b += c * (sol.steps[m - j].vertex_coeff -
              sol.steps[m - j - 1].vertex_coeff);
    graph_axpy(c, sol.steps[m - j].density, phi);
    graph_axpy(-c, sol.steps[m - j - 1].density, phi);
  }
  return SingularRepresentation(graph, sol.steps[0].beta, b, std::move(phi));
}

}  // namespace

EnergyMonitor energy_monitor(const DirectSolution& sol,
                             const DirectProblem& p) {
  const TimeGrid tg = sol.time;
  const std::size_t steps = tg.steps;
  const double dt = tg.dt();
  const double alpha = p.alpha.value();
  const double d0 = std::pow(dt, -alpha) / gamma_fn(2.0 - alpha);
  const std::vector<double> a = caputo_weights(alpha, steps);

  Series phi_norm2(tg.as_spatial(),
                   std::vector<double>(steps + 1, 0.0));
  for (std::size_t m = 0; m <= steps; ++m) {
    const GraphSeries& d = sol.steps[m].density;
    phi_norm2[m] = graph_inner(d, d);
  }
  const Series mem =
      frac_integral(phi_norm2, FracOrder(1.0 - alpha), Side::Left);

  TimeSeries lhs = TimeSeries::zeros(tg);
  TimeSeries rhs = TimeSeries::zeros(tg);
  double cum_lhs = 0.0;
  double cum_rhs = 0.0;
  for (std::size_t m = 1; m <= steps; ++m) {
    const SingularRepresentation du = l1_derivative_at(sol, a, d0, m);
    const GraphSeries du_reg = regular_part(du);
    const GraphSeries lu = apply_L(sol.steps[m], p.coeff);

    const double du2 = singular_pair_integral(du.vertex_coeff, du_reg,
                                              du.vertex_coeff, du_reg, p.beta);
    const double lu2 = graph_inner(lu, lu);

    GraphSeries au_reg = du_reg;
    graph_axpy(1.0, lu, au_reg);
    const double au2 = singular_pair_integral(du.vertex_coeff, au_reg,
                                              du.vertex_coeff, au_reg, p.beta);

    cum_lhs += dt * (du2 + lu2);
    cum_rhs += dt * au2;
    lhs[m] = cum_lhs + p.coeff.p1 * mem[m];
    rhs[m] = cum_rhs;
  }
  return EnergyMonitor{std::move(lhs), std::move(rhs)};
}

double friedrichs_ratio(const TimeSeries& v, FracOrder alpha) {
  const Series f(v.grid.as_spatial(), v.values);
  const Series df = caputo_derivative(f, alpha, Side::Left);
  const double nv = time_l2_norm(v);
  if (nv == 0.0) return 0.0;
  const double nd = time_l2_norm(TimeSeries(v.grid, df.values));
  const double bound = std::pow(v.grid.horizon, alpha.value()) /
                       gamma_fn(alpha.value() + 1.0);
  return nv / (bound * nd);
}

FriedrichsReport friedrichs_check(const DirectSolution& sol,
                                  const DirectProblem& p) {
  FriedrichsReport rep;
  const StarGraph& graph = p.graph();
  const std::size_t steps = sol.time.steps;
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const std::size_t n = graph.edge(k).intervals;
    const std::size_t picks[4] = {std::max<std::size_t>(1, n / 4), n / 2,
                                  3 * n / 4, n};
    std::size_t prev = 0;
    for (std::size_t i : picks) {
      if (i == prev || i == 0) continue;
      prev = i;
      TimeSeries traj = TimeSeries::zeros(sol.time);
      for (std::size_t m = 0; m <= steps; ++m) {
        traj[m] = sol.values[m].edge(k)[i];
      }
      const double ratio = friedrichs_ratio(traj, p.alpha);
      ++rep.samples;
      rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    }
  }
  rep.all_within = rep.worst_ratio <= 1.0 + rep.slack;
  return rep;
}

}  // namespace fracstar
