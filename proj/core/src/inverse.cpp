#include "fracstar/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracstar {

namespace {

GraphSeries sample_field(const SpaceTimeField& f, const StarGraph& graph,
                         double t) {
  GraphSeries out = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const UniformGrid& g = graph.edge(k);
    Series& e = out.edge(k);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      e[i] = f(k, g.node(i), t);
    }
  }
  return out;
}

double max_abs(const TimeSeries& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

// State shared across fixed-point iterations: the factored operator, the
// presampled g field, g*, and the eta weights of the moment in (Bf).
struct IterationContext {
  SteppingOperator op;
  std::vector<GraphSeries> g_at;  // g(., t_m), all nodes
  TimeSeries g_star;
  GraphSeries eta_weight;  // trapezoid weight * gamma * phi_eta per node

  IterationContext(const InverseProblem& p)
      : op(assemble_stepping(std::pow(p.time.dt(), -p.alpha.value()) /
                                 gamma_fn(2.0 - p.alpha.value()),
                             p.coeff, p.beta)),
        g_star(compute_g_star(p)),
        eta_weight(GraphSeries::zeros(p.graph())) {
    const StarGraph& graph = p.graph();
    g_at.reserve(p.time.steps + 1);
    for (std::size_t m = 0; m <= p.time.steps; ++m) {
      g_at.push_back(sample_field(p.g, graph, p.time.node(m)));
    }
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
      const std::vector<double> tw = trapezoid_weights(graph.edge(k));
      Series& w = eta_weight.edge(k);
      for (std::size_t i = 0; i < tw.size(); ++i) {
        w[i] = tw[i] * p.coeff.gamma.edge(k)[i] * p.eta.density.edge(k)[i];
      }
    }
  }

  TimeSeries apply(const TimeSeries& f, const InverseProblem& p) const {
    const std::size_t steps = p.time.steps;
    std::vector<GraphSeries> source_at;
    source_at.reserve(steps + 1);
    for (std::size_t m = 0; m <= steps; ++m) {
      GraphSeries s = g_at[m];
      graph_scale(f[m], s);
      source_at.push_back(std::move(s));
    }
    const DirectSolution z =
        solve_direct_prefactored(op, p.alpha, p.time, source_at);
    return moment_series(z, p);
  }

  // (1/g*) sum_k int gamma phi_z phi_eta per time node.
  TimeSeries moment_series(const DirectSolution& z,
                           const InverseProblem& p) const {
    TimeSeries out = TimeSeries::zeros(p.time);
    for (std::size_t m = 1; m <= p.time.steps; ++m) {
      const double gs = g_star[m];
      if (gs == 0.0) {
        throw std::runtime_error("g* vanishes at a time node");
      }
      double acc = 0.0;
      for (std::size_t k = 0; k < eta_weight.edge_count(); ++k) {
        const Series& w = eta_weight.edge(k);
        const Series& phi = z.steps[m].density.edge(k);
        for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * phi[i];
      }
      out[m] = acc / gs;
    }
    return out;
  }
};

}  // namespace

InverseProblem::InverseProblem(Coefficients coeff_, FracOrder alpha_,
                               FracOrder beta_, TimeGrid time_,
                               SpaceTimeField g_, SpaceTimeField h_,
                               SingularRepresentation eta_, TimeSeries psi_)
    : coeff(std::move(coeff_)),
      alpha(alpha_),
      beta(beta_),
      time(time_),
      g(std::move(g_)),
      h(std::move(h_)),
      eta(std::move(eta_)),
      psi(std::move(psi_)) {
  if (!(beta.value() > 0.5)) {
    throw std::domain_error("inverse problem requires beta > 1/2");
  }
  if (!g) throw std::invalid_argument("inverse problem requires g");
  if (!(eta.graph == coeff.graph())) {
    throw std::invalid_argument("eta lives on a different graph");
  }
  if (eta.beta.value() != beta.value()) {
    throw std::invalid_argument("eta representation order differs from beta");
  }
  if (!(psi.grid == time)) {
    throw std::invalid_argument("psi lives on a different time grid");
  }
}

double k1_constant(double p1, double p2, double c, double m, double q) {
  if (!(p1 > 0.0) || !(q > 0.0)) {
    throw std::domain_error("k1_constant requires p1 > 0 and q > 0");
  }
  return p2 * p2 * m * m * c * c / (p1 * q * q);
}

double overdetermination_moment(const SingularRepresentation& u,
                                const SingularRepresentation& eta) {
  if (u.beta.value() != eta.beta.value()) {
    throw std::invalid_argument("moment of representations with mixed beta");
  }
  return singular_pair_integral(u.vertex_coeff, regular_part(u),
                                eta.vertex_coeff, regular_part(eta), u.beta);
}

double overdetermination_moment(const SingularRepresentation& eta,
                                const GraphSeries& values) {
  return singular_pair_integral(eta.vertex_coeff, regular_part(eta), 0.0,
                                values, eta.beta);
}

TimeSeries compute_g_star(const InverseProblem& p) {
  TimeSeries out = TimeSeries::zeros(p.time);
  const GraphSeries eta_reg = regular_part(p.eta);
  for (std::size_t m = 0; m <= p.time.steps; ++m) {
    const GraphSeries g_m = sample_field(p.g, p.graph(), p.time.node(m));
    out[m] = singular_pair_integral(p.eta.vertex_coeff, eta_reg, 0.0, g_m,
                                    p.beta);
  }
  return out;
}

K1Report check_K1(const InverseProblem& p) {
  K1Report rep;
  for (std::size_t m = 0; m <= p.time.steps; ++m) {
    const GraphSeries g_m = sample_field(p.g, p.graph(), p.time.node(m));
    rep.c = std::max(rep.c, graph_l2_norm(g_m));
  }
  rep.m = std::sqrt(graph_inner(p.eta.density, p.eta.density));

  const TimeSeries gs = compute_g_star(p);
  rep.q = std::numeric_limits<double>::infinity();
  for (double v : gs.values) rep.q = std::min(rep.q, std::abs(v));

  for (std::size_t k = 0; k < p.graph().edge_count(); ++k) {
    const Series& phi = p.eta.density.edge(k);
    double scale = std::abs(p.eta.vertex_coeff);
    for (double v : phi.values) scale = std::max(scale, std::abs(v));
    const double resid = std::abs(p.eta.vertex_coeff + trapezoid(phi));
    if (resid > 1e-8 * (1.0 + scale)) {
      rep.violations.push_back("eta boundary condition");
      break;
    }
  }
  bool psi_finite = true;
  for (double v : p.psi.values) psi_finite = psi_finite && std::isfinite(v);
  if (!psi_finite) rep.violations.push_back("psi non-finite");
  if (psi_finite && std::abs(p.psi[0]) > 1e-8 * max_abs(p.psi)) {
    rep.violations.push_back("psi compatibility");
  }
  if (!(rep.q > 0.0)) rep.violations.push_back("q = 0");
  if (!(rep.m > 0.0)) rep.violations.push_back("m = 0");

  rep.feasible = rep.violations.empty();
  rep.C = rep.q > 0.0
              ? k1_constant(p.coeff.p1, p.coeff.p2, rep.c, rep.m, rep.q)
              : std::numeric_limits<double>::infinity();
  return rep;
}

TimeSeries compute_E(const InverseProblem& p, const DirectSolution& y,
                     double compat_tol_factor) {
  TimeSeries e = TimeSeries::zeros(p.time);
  const GraphSeries eta_reg = regular_part(p.eta);
  for (std::size_t m = 0; m <= p.time.steps; ++m) {
    const double mom = singular_pair_integral(
        y.steps[m].vertex_coeff, regular_part(y.steps[m]),
        p.eta.vertex_coeff, eta_reg, p.beta);
    e[m] = p.psi[m] - mom;
  }
  const double tol = compat_tol_factor * max_abs(p.psi);
  if (std::abs(e[0]) > tol) {
    throw std::invalid_argument(
        "overdetermination data incompatible with zero initial state: "
        "|E(0)| = " +
        std::to_string(std::abs(e[0])));
  }
  return e;
}

TimeSeries apply_B(const TimeSeries& f, const InverseProblem& p) {
  if (!(f.grid == p.time)) {
    throw std::invalid_argument("apply_B: f lives on a different time grid");
  }
  const IterationContext ctx(p);
  return ctx.apply(f, p);
}

NeumannTail neumann_tail(double C, FracOrder alpha, double T,
                         std::size_t j_max) {
  if (!(C >= 0.0) || !std::isfinite(C)) {
    throw std::invalid_argument("neumann_tail requires finite C >= 0");
  }
  if (!(T > 0.0)) throw std::invalid_argument("neumann_tail requires T > 0");
  NeumannTail tail;
  const double x = std::sqrt(C) * std::pow(T, alpha.value());
  double sum = 0.0;
  for (std::size_t j = 0; j <= j_max; ++j) {
    double term;
    if (j == 0) {
      term = 1.0;
    } else if (x == 0.0) {
      term = 0.0;
    } else {
      term = std::exp(static_cast<double>(j) * std::log(x) -
                      0.5 * std::lgamma(static_cast<double>(j) *
                                            alpha.value() +
                                        1.0));
    }
    sum += term;
    tail.partial_sums.push_back(sum);
    if (j > 0 && term < 1e-15) {
      tail.converged = true;
      break;
    }
  }
  return tail;
}

InverseSolution solve_inverse(const InverseProblem& p, double tol,
                              std::size_t max_iter,
                              const std::optional<TimeSeries>& start) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_inverse: tol <= 0");
  if (max_iter == 0) throw std::invalid_argument("solve_inverse: max_iter == 0");

  const K1Report k1 = check_K1(p);
  if (!k1.feasible) {
    std::string msg = "inverse problem infeasible:";
    for (const std::string& v : k1.violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }

  // Background state from h alone; E(t) = psi(t) - moment(y, eta).
  DirectSolution y =
      p.h ? solve_direct(DirectProblem(p.coeff, p.alpha, p.beta, p.time, p.h))
          : DirectSolution{p.time,
                           std::vector<SingularRepresentation>(
                               p.time.steps + 1,
                               SingularRepresentation::zeros(p.graph(), p.beta)),
                           std::vector<GraphSeries>(
                               p.time.steps + 1,
                               GraphSeries::zeros(p.graph())),
                           {}};
  const TimeSeries E = compute_E(p, y);

  const IterationContext ctx(p);

  // r = ∂^alpha E / g*, L1 on the E series (E(0) = 0 was just enforced).
  const Series dE = caputo_derivative(Series(p.time.as_spatial(), E.values),
                                      p.alpha, Side::Left);
  TimeSeries r = TimeSeries::zeros(p.time);
  for (std::size_t m = 0; m <= p.time.steps; ++m) {
    r[m] = dE[m] / ctx.g_star[m];
  }
  r[0] = 0.0;

  const double neumann_bound =
      neumann_tail(k1.C, p.alpha, p.time.horizon, 600).partial_sums.back();

  std::vector<double> residual_history;
  std::size_t iterations = 0;
  bool converged = false;
  TimeSeries f = start ? *start : r;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    const TimeSeries bf = ctx.apply(f, p);
    TimeSeries fn = r;
    for (std::size_t m = 0; m <= p.time.steps; ++m) fn[m] += bf[m];
    TimeSeries diff = fn;
    for (std::size_t m = 0; m <= p.time.steps; ++m) diff[m] -= f[m];
    const double inc = time_l2_norm(diff);
    residual_history.push_back(inc);
    iterations = iter;
    f = std::move(fn);
    if (inc < tol) {
      converged = true;
      break;
    }
  }

  // Final state with the recovered source f g + h and the data residual.
  std::vector<GraphSeries> source_at;
  source_at.reserve(p.time.steps + 1);
  for (std::size_t m = 0; m <= p.time.steps; ++m) {
    GraphSeries s = ctx.g_at[m];
    graph_scale(f[m], s);
    if (p.h) {
      const double t = p.time.node(m);
      for (std::size_t k = 0; k < p.graph().edge_count(); ++k) {
        const UniformGrid& g = p.graph().edge(k);
        Series& e = s.edge(k);
        for (std::size_t i = 1; i < g.node_count(); ++i) {
          e[i] += p.h(k, g.node(i), t);
        }
        e[0] = 0.0;  // vertex node is a constraint row; h may be singular
      }
    }
    source_at.push_back(std::move(s));
  }
  DirectSolution z =
      solve_direct_prefactored(ctx.op, p.alpha, p.time, source_at);

  double data_residual = 0.0;
  const GraphSeries eta_reg = regular_part(p.eta);
  for (std::size_t m = 0; m <= p.time.steps; ++m) {
    const double mom = singular_pair_integral(
        z.steps[m].vertex_coeff, regular_part(z.steps[m]),
        p.eta.vertex_coeff, eta_reg, p.beta);
    data_residual = std::max(data_residual, std::abs(mom - p.psi[m]));
  }

  f[0] = f[1];  // the scheme never uses f(t_0); report the limit value
  return InverseSolution{std::move(f),     std::move(z),
                         iterations,       std::move(residual_history),
                         neumann_bound,    data_residual,
                         converged};
}

}  // namespace fracstar
