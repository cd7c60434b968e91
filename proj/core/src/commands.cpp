#include "fracstar/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <utility>

#include "fracstar/direct.hpp"
#include "fracstar/format.hpp"
#include "fracstar/inverse.hpp"
#include "fracstar/verify.hpp"
#include "json.hpp"

namespace fracstar {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

double interp_table(const Table& table, double x) {
  if (x <= table.front().first) return table.front().second;
  if (x >= table.back().first) return table.back().second;
  const auto hi = std::upper_bound(
      table.begin(), table.end(), x,
      [](double v, const std::pair<double, double>& row) { return v < row.first; });
  const auto lo = hi - 1;
  const double w = (x - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

StarGraph build_graph(const Config& cfg) {
  std::vector<UniformGrid> edges;
  for (const EdgeConfig& e : cfg.edges) edges.emplace_back(e.length, e.nodes - 1);
  return StarGraph(std::move(edges));
}

StarGraph graph_with_intervals(const Config& cfg, std::size_t intervals) {
  std::vector<UniformGrid> edges;
  for (const EdgeConfig& e : cfg.edges) edges.emplace_back(e.length, intervals);
  return StarGraph(std::move(edges));
}

/// Coefficient evaluator from the per-edge expressions/tables, with global
/// bounds estimated on a fine sample (margins absorb variation between
/// sample points on refined grids).
CoefficientField build_field(const Config& cfg) {
  struct EdgeGamma {
    std::optional<Expression> expr;
    Table table;
  };
  std::vector<EdgeGamma> per_edge;
  for (const EdgeConfig& e : cfg.edges) {
    per_edge.push_back({e.gamma ? std::optional<Expression>(e.gamma->parsed)
                                : std::nullopt,
                        e.gamma_table});
  }
  auto gamma = [per_edge](std::size_t k, double x) -> double {
    const EdgeGamma& e = per_edge[k];
    if (e.expr) {
      return e.expr->eval(
          {{"x", x}, {"k", static_cast<double>(k + 1)}});
    }
    return interp_table(e.table, x);
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t k = 0; k < cfg.edges.size(); ++k) {
    const double length = cfg.edges[k].length;
    for (int i = 0; i <= 512; ++i) {
      const double v = gamma(k, length * i / 512.0);
      if (!std::isfinite(v) || v <= 0.0) {
        throw ConfigError("edges[" + std::to_string(k) + "].gamma",
                          "must be positive and finite on the edge");
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return CoefficientField{std::move(gamma), 0.99 * lo, 1.01 * hi};
}

SpaceTimeField make_space_time(const std::optional<ConfigExpr>& e) {
  if (!e) return {};
  Expression ex = e->parsed;
  return [ex](std::size_t k, double x, double t) {
    return ex.eval({{"x", x}, {"t", t}, {"k", static_cast<double>(k + 1)}});
  };
}

/// Direct-problem source: h plus f_true * g when both are configured.
SpaceTimeField make_direct_source(const Config& cfg) {
  const bool with_fg = cfg.f_true && cfg.source_g;
  if (!cfg.source_h && !with_fg) return {};
  std::optional<Expression> h, g, f;
  if (cfg.source_h) h = cfg.source_h->parsed;
  if (with_fg) {
    g = cfg.source_g->parsed;
    f = cfg.f_true->parsed;
  }
  return [h, g, f](std::size_t k, double x, double t) {
    const std::map<std::string, double> at{
        {"x", x}, {"t", t}, {"k", static_cast<double>(k + 1)}};
    double v = 0.0;
    if (h) v += h->eval(at);
    if (g) v += f->eval({{"t", t}}) * g->eval(at);
    return v;
  };
}

SingularRepresentation build_eta(const Config& cfg, const StarGraph& graph,
                                 FracOrder beta) {
  GraphSeries phi = GraphSeries::zeros(graph);
  const Expression& ex = cfg.eta_phi->parsed;
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const UniformGrid& grid = graph.edge(k);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      phi.edge(k)[i] = ex.eval(
          {{"x", grid.node(i)}, {"k", static_cast<double>(k + 1)}});
    }
  }
  return SingularRepresentation(graph, beta, *cfg.eta_b, std::move(phi));
}

TimeSeries build_psi(const Config& cfg, const TimeGrid& time) {
  TimeSeries psi = TimeSeries::zeros(time);
  for (std::size_t m = 0; m <= time.steps; ++m) {
    const double t = time.node(m);
    psi[m] = cfg.psi ? cfg.psi->parsed.eval({{"t", t}})
                     : interp_table(cfg.psi_table, t);
  }
  return psi;
}

TimeSeries sample_f_true(const Config& cfg, const TimeGrid& time) {
  TimeSeries f = TimeSeries::zeros(time);
  for (std::size_t m = 0; m <= time.steps; ++m) {
    f[m] = cfg.f_true->parsed.eval({{"t", time.node(m)}});
  }
  return f;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_summary(const Config& cfg, const ordered_json& summary) {
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
}

std::string f_csv(const TimeSeries& f) {
  std::string out = "t,f\n";
  for (std::size_t m = 0; m < f.size(); ++m) {
    out += format_double(f.grid.node(m));
    out += ",";
    out += format_double(f[m]);
    out += "\n";
  }
  return out;
}

/// Writes field_<m>.csv for each requested index and returns the summary
/// entries (per-file statistics are recomputable from the file itself).
ordered_json write_snapshots(const DirectSolution& sol,
                             std::vector<std::size_t> snaps,
                             const fs::path& dir) {
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  ordered_json list = ordered_json::array();
  for (const std::size_t m : snaps) {
    const SingularRepresentation& u = sol.steps.at(m);
    const GraphSeries reg = regular_part(u);
    const bool singular = u.vertex_coeff != 0.0;
    std::string text = "# b=" + format_double(u.vertex_coeff) +
                       " singular_at_vertex=" + (singular ? "1" : "0") +
                       " t=" + format_double(sol.time.node(m)) + "\n";
    text += "edge,x,u_regular,phi\n";
    double max_reg = 0.0;
    double max_phi = 0.0;
    for (std::size_t k = 0; k < reg.edge_count(); ++k) {
      const UniformGrid& grid = reg.edge(k).grid;
      for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const double r = reg.edge(k)[i];
        const double p = u.density.edge(k)[i];
        max_reg = std::max(max_reg, std::abs(r));
        max_phi = std::max(max_phi, std::abs(p));
        text += std::to_string(k + 1);
        text += ",";
        text += format_double(grid.node(i));
        text += ",";
        text += format_double(r);
        text += ",";
        text += format_double(p);
        text += "\n";
      }
    }
    const std::string name = "field_" + std::to_string(m) + ".csv";
    write_file(dir / name, text);
    list.push_back(ordered_json{{"index", m},
                                {"t", sol.time.node(m)},
                                {"file", name},
                                {"b", u.vertex_coeff},
                                {"singular_at_vertex", singular},
                                {"max_abs_u_regular", max_reg},
                                {"max_abs_phi", max_phi}});
  }
  return list;
}

ordered_json diagnostics_json(const DirectDiagnostics& d) {
  return ordered_json{{"max_boundary_residual", d.max_boundary_residual},
                      {"max_flux_residual", d.max_flux_residual},
                      {"max_rhs_inf", d.max_rhs_inf},
                      {"condition_estimate", d.condition_estimate}};
}

ordered_json k1_json(const K1Report& k1) {
  ordered_json j{{"c", k1.c}, {"m", k1.m}, {"q", k1.q}};
  if (std::isfinite(k1.C)) {
    j["C"] = k1.C;
  } else {
    j["C"] = nullptr;  // unbounded (q = 0)
  }
  j["feasible"] = k1.feasible;
  j["violations"] = k1.violations;
  return j;
}

ordered_json neumann_json(const K1Report& k1, FracOrder alpha, double T) {
  if (!std::isfinite(k1.C)) return nullptr;
  const NeumannTail tail = neumann_tail(k1.C, alpha, T, 40);
  return ordered_json{{"partial_sums", tail.partial_sums},
                      {"converged", tail.converged}};
}

ordered_json header_json(const std::string& command, const Config& cfg) {
  ordered_json j;
  j["command"] = command;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["T"] = cfg.T;
  j["time_steps"] = cfg.time_steps;
  ordered_json edges = ordered_json::array();
  for (const EdgeConfig& e : cfg.edges) {
    edges.push_back(ordered_json{{"length", e.length}, {"nodes", e.nodes}});
  }
  j["edges"] = std::move(edges);
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  return j;
}

int cmd_solve_direct(const Config& cfg, std::ostream& log) {
  const StarGraph graph = build_graph(cfg);
  const CoefficientField field = build_field(cfg);
  const DirectProblem problem(field.sample(graph), FracOrder(cfg.alpha),
                              FracOrder(cfg.beta), TimeGrid(cfg.T, cfg.time_steps),
                              make_direct_source(cfg));
  const DirectSolution sol = solve_direct(problem);

  fs::create_directories(cfg.out_dir);
  const std::vector<std::size_t> snaps =
      cfg.snapshots.empty() ? std::vector<std::size_t>{cfg.time_steps}
                            : cfg.snapshots;

  ordered_json summary = header_json("solve-direct", cfg);
  summary["diagnostics"] = diagnostics_json(sol.diagnostics);
  summary["snapshots"] = write_snapshots(sol, snaps, cfg.out_dir);
  summary["exit_code"] = 0;
  write_summary(cfg, summary);
  log << "solve-direct: " << snaps.size() << " snapshot(s) in " << cfg.out_dir
      << "\n";
  return 0;
}

struct BuiltInverse {
  InverseProblem problem;
  std::optional<TimeSeries> f_reference;
  bool manufactured;
};

/// Two ways to pose the inverse problem: explicit data (g, eta, and usually
/// psi) or a manufactured instance synthesized from f_true and the seed.
BuiltInverse build_inverse(const Config& cfg, bool require_psi) {
  const StarGraph graph = build_graph(cfg);
  const CoefficientField field = build_field(cfg);
  const TimeGrid time(cfg.T, cfg.time_steps);
  const bool has_psi = cfg.psi.has_value() || !cfg.psi_table.empty();
  const bool has_data = cfg.source_g || cfg.eta_b || cfg.eta_phi;

  if (has_data) {
    if (!cfg.source_g) {
      throw ConfigError("sources.g", "required alongside explicit data");
    }
    if (!cfg.eta_b || !cfg.eta_phi) {
      throw ConfigError("eta", "required alongside explicit data");
    }
    if (require_psi && !has_psi) {
      throw ConfigError("psi", "required to solve with explicit data");
    }
    TimeSeries psi = has_psi ? build_psi(cfg, time) : TimeSeries::zeros(time);
    InverseProblem problem(field.sample(graph), FracOrder(cfg.alpha),
                           FracOrder(cfg.beta), time,
                           make_space_time(cfg.source_g),
                           make_space_time(cfg.source_h),
                           build_eta(cfg, graph, FracOrder(cfg.beta)),
                           std::move(psi));
    std::optional<TimeSeries> reference;
    if (cfg.f_true) reference = sample_f_true(cfg, time);
    return BuiltInverse{std::move(problem), std::move(reference), false};
  }

  if (has_psi) {
    throw ConfigError("psi", "explicit data also needs sources.g and eta");
  }
  if (!cfg.f_true) {
    throw ConfigError(
        "f_true", "give sources.g/eta/psi (data) or f_true (manufactured)");
  }
  const TimeSeries f_series = sample_f_true(cfg, time);
  const Expression f_expr = cfg.f_true->parsed;
  ManufacturedInverse inst = manufactured_inverse(
      graph, field, FracOrder(cfg.alpha), FracOrder(cfg.beta), f_series,
      cfg.seed, [f_expr](double t) { return f_expr.eval({{"t", t}}); });
  return BuiltInverse{std::move(inst.problem), std::move(inst.f_true), true};
}

int cmd_solve_inverse(const Config& cfg, std::ostream& log) {
  BuiltInverse built = build_inverse(cfg, /*require_psi=*/true);
  const InverseProblem& problem = built.problem;
  const K1Report k1 = check_K1(problem);

  ordered_json summary = header_json("solve-inverse", cfg);
  summary["mode"] = built.manufactured ? "manufactured" : "data";
  if (built.manufactured) summary["seed"] = cfg.seed;
  summary["k1"] = k1_json(k1);
  summary["neumann"] = neumann_json(k1, problem.alpha, cfg.T);

  if (!k1.feasible) {
    summary["error"] = "inverse problem infeasible";
    summary["exit_code"] = 1;
    write_summary(cfg, summary);
    log << "solve-inverse: infeasible";
    for (const std::string& v : k1.violations) log << " [" << v << "]";
    log << "\n";
    return 1;
  }

  const InverseSolution sol = solve_inverse(problem, cfg.tol, cfg.max_iter);

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "f.csv", f_csv(sol.f));

  summary["iterations"] = sol.iterations;
  summary["converged"] = sol.converged;
  summary["residual_history"] = sol.residual_history;
  summary["neumann_bound"] = sol.neumann_bound;
  summary["overdetermination_residual"] = sol.overdetermination_residual;
  double max_abs_f = 0.0;
  for (std::size_t m = 0; m < sol.f.size(); ++m) {
    max_abs_f = std::max(max_abs_f, std::abs(sol.f[m]));
  }
  summary["f"] = ordered_json{{"file", "f.csv"},
                              {"l2", time_l2_norm(sol.f)},
                              {"max_abs", max_abs_f}};
  if (built.f_reference) {
    TimeSeries diff = sol.f;
    for (std::size_t m = 0; m < diff.size(); ++m) {
      diff[m] -= (*built.f_reference)[m];
    }
    const double den = time_l2_norm(*built.f_reference);
    summary["relative_error_vs_f_true"] =
        den > 0.0 ? time_l2_norm(diff) / den : time_l2_norm(diff);
  }
  summary["direct_diagnostics"] = diagnostics_json(sol.z.diagnostics);
  if (!cfg.snapshots.empty()) {
    summary["snapshots"] = write_snapshots(sol.z, cfg.snapshots, cfg.out_dir);
  }

  const int code = sol.converged ? 0 : 2;
  summary["exit_code"] = code;
  write_summary(cfg, summary);
  log << "solve-inverse: " << (sol.converged ? "converged" : "NOT converged")
      << " after " << sol.iterations << " iteration(s), residual "
      << (sol.residual_history.empty() ? 0.0 : sol.residual_history.back())
      << "\n";
  return code;
}

int cmd_check_k1(const Config& cfg, std::ostream& log) {
  BuiltInverse built = build_inverse(cfg, /*require_psi=*/false);
  const K1Report k1 = check_K1(built.problem);

  ordered_json summary = header_json("check-k1", cfg);
  summary["mode"] = built.manufactured ? "manufactured" : "data";
  if (built.manufactured) summary["seed"] = cfg.seed;
  summary["k1"] = k1_json(k1);
  summary["neumann"] = neumann_json(k1, built.problem.alpha, cfg.T);
  const int code = k1.feasible ? 0 : 1;
  summary["exit_code"] = code;
  write_summary(cfg, summary);

  log << "check-k1: " << (k1.feasible ? "feasible" : "infeasible");
  for (const std::string& v : k1.violations) log << " [" << v << "]";
  log << "\n";
  return code;
}

double weighted_inner(const Series& a, const Series& b) {
  const std::vector<double> w = trapezoid_weights(a.grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

int cmd_verify_operators(const Config& cfg, std::ostream& log) {
  const FracOrder alpha(cfg.alpha);
  const FracOrder beta(cfg.beta);
  const CoefficientField field = build_field(cfg);
  // Identity checks run at a pinned internal resolution so the tolerances
  // below are meaningful regardless of the configured grid sizes.
  const StarGraph graph = graph_with_intervals(cfg, 128);
  const Coefficients coeff = field.sample(graph);
  const std::vector<EdgePoly> polys =
      random_edge_polys(graph, cfg.seed + 7, 3, 1.0);

  struct Check {
    std::string name;
    double value;
    double tolerance;
    bool pass;
  };
  std::vector<Check> checks;
  const auto add = [&checks](std::string name, double value, double tol) {
    checks.push_back({std::move(name), value, tol, value <= tol});
  };

  GraphSeries omega = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const UniformGrid& grid = graph.edge(k);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      omega.edge(k)[i] = polys[k](grid.node(i));
    }
  }

  {  // caputo^beta I^beta f = f when f(0) = 0, relative L2 per edge
    double worst = 0.0;
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
      Series f = omega.edge(k);
      const double f0 = f[0];
      for (std::size_t i = 0; i < f.size(); ++i) f[i] -= f0;
      const Series back =
          caputo_derivative(frac_integral(f, beta, Side::Left), beta,
                            Side::Left);
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        num += (back[i] - f[i]) * (back[i] - f[i]);
        den += f[i] * f[i];
      }
      if (den > 0.0) worst = std::max(worst, std::sqrt(num / den));
    }
    add("integral_derivative_composition", worst, 2e-2);
  }

  {  // <I_l f, g> = <f, I_r g> (Fubini on the triangle)
    double worst = 0.0;
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
      const Series f = omega.edge(k);
      const EdgePoly& other = polys[(k + 1) % graph.edge_count()];
      Series g = Series::zeros(f.grid);
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = other(f.grid.node(i));
      }
      const Series fl = frac_integral(f, beta, Side::Left);
      const Series gr = frac_integral(g, beta, Side::Right);
      const double lhs = weighted_inner(fl, g);
      const double rhs = weighted_inner(f, gr);
      const double den = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
      worst = std::max(worst, std::abs(lhs - rhs) / den);
    }
    add("integration_by_parts", worst, 1e-3);
  }

  {  // assembled determinant vs closed form
    const VertexSystem vs = assemble_vertex_system(omega, coeff, beta);
    const double det = vs.P.determinant();
    const double closed = det_P_closed_form(coeff);
    add("vertex_determinant", std::abs(det - closed) / std::abs(closed), 1e-10);
  }

  {  // invert then re-apply the spatial operator
    const SingularRepresentation u = invert_L(omega, coeff, beta);
    GraphSeries back = apply_L(u, coeff);
    graph_axpy(-1.0, omega, back);
    add("solve_then_apply", graph_l2_norm(back) / graph_l2_norm(omega), 2e-2);
  }

  {  // zero-order stepping operator agrees with the explicit inversion
    const SteppingOperator op0 = assemble_stepping(0.0, coeff, beta);
    const SingularRepresentation a = stepping_solve(op0, omega);
    const SingularRepresentation b = invert_L(omega, coeff, beta);
    GraphSeries diff = a.density;
    graph_axpy(-1.0, b.density, diff);
    const double num = std::abs(a.vertex_coeff - b.vertex_coeff) +
                       graph_l2_norm(diff);
    const double den =
        std::abs(b.vertex_coeff) + graph_l2_norm(b.density) + 1e-30;
    add("stepping_zero_order", num / den, 1e-9);
  }

  {  // energy identity and fractional Friedrichs bound on a manufactured run
    const ManufacturedDirect md =
        manufactured_direct(graph_with_intervals(cfg, 64), field, alpha, beta,
                            cfg.sigma, TimeGrid(cfg.T, 64), cfg.seed);
    const DirectSolution sol = solve_direct(md.problem);
    const EnergyMonitor em = energy_monitor(sol, md.problem);
    double worst = 0.0;
    for (std::size_t m = 1; m < em.lhs.size(); ++m) {
      if (em.rhs[m] > 0.0) worst = std::max(worst, em.lhs[m] / em.rhs[m]);
    }
    add("energy_inequality_ratio", worst, 1.05);
    const FriedrichsReport fr = friedrichs_check(sol, md.problem);
    add("friedrichs_ratio", fr.worst_ratio, 1.0 + fr.slack);
  }

  ordered_json summary = header_json("verify-operators", cfg);
  summary["seed"] = cfg.seed;
  ordered_json list = ordered_json::array();
  bool all_pass = true;
  for (const Check& c : checks) {
    all_pass = all_pass && c.pass;
    list.push_back(ordered_json{{"name", c.name},
                                {"value", c.value},
                                {"tolerance", c.tolerance},
                                {"pass", c.pass}});
    log << "verify-operators: " << (c.pass ? "pass" : "FAIL") << " " << c.name
        << " value=" << c.value << " tol=" << c.tolerance << "\n";
  }
  summary["checks"] = std::move(list);
  summary["all_pass"] = all_pass;
  const int code = all_pass ? 0 : 1;
  summary["exit_code"] = code;
  write_summary(cfg, summary);
  return code;
}

int cmd_convergence(const Config& cfg, std::ostream& log) {
  if (cfg.levels.size() < 3) {
    throw ConfigError("levels", "need at least 3 refinement levels");
  }
  const CoefficientField field = build_field(cfg);
  const FracOrder alpha(cfg.alpha);
  const FracOrder beta(cfg.beta);

  const LevelError family = [&](std::size_t intervals, std::size_t steps) {
    const StarGraph graph = graph_with_intervals(cfg, intervals);
    const ManufacturedDirect md = manufactured_direct(
        graph, field, alpha, beta, cfg.sigma, TimeGrid(cfg.T, steps), cfg.seed);
    const DirectSolution sol = solve_direct(md.problem);
    const double err = manufactured_error(md, sol);
    log << "convergence: N=" << intervals << " M=" << steps
        << " error=" << err << "\n";
    return err;
  };
  const ConvergenceTable table = convergence_study(family, cfg.levels);

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "convergence.csv", convergence_csv(table));

  ordered_json summary = header_json("convergence", cfg);
  summary["sigma"] = cfg.sigma;
  summary["seed"] = cfg.seed;
  ordered_json levels = ordered_json::array();
  for (const ConvergenceLevel& level : table.levels) {
    ordered_json j{{"intervals", level.intervals},
                   {"steps", level.steps},
                   {"error", level.error}};
    if (level.order_defined) {
      j["order"] = level.observed_order;
    } else {
      j["order"] = nullptr;
    }
    levels.push_back(std::move(j));
  }
  summary["levels"] = std::move(levels);
  summary["monotone"] = table.monotone;
  summary["file"] = "convergence.csv";
  const int code = table.monotone ? 0 : 2;
  summary["exit_code"] = code;
  write_summary(cfg, summary);
  log << "convergence: " << (table.monotone ? "monotone" : "NOT monotone")
      << " over " << table.levels.size() << " levels\n";
  return code;
}

void write_error_summary(const std::string& out_dir, const std::string& command,
                         const std::string& what) {
  try {
    fs::create_directories(out_dir);
    ordered_json summary{
        {"command", command}, {"error", what}, {"exit_code", 1}};
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  } catch (...) {
    // Emitting the summary is best effort; the exit code still reports.
  }
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> parse_levels(
    const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> levels;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string token = text.substr(start, end - start);
    const std::size_t cross = token.find('x');
    if (token.empty() || cross == std::string::npos) {
      throw ConfigError("levels", "expected \"NxM\" entries, got '" + token + "'");
    }
    std::size_t intervals = 0;
    std::size_t steps = 0;
    const char* ib = token.data();
    const char* ie = token.data() + cross;
    const char* sb = token.data() + cross + 1;
    const char* se = token.data() + token.size();
    const auto ir = std::from_chars(ib, ie, intervals);
    const auto sr = std::from_chars(sb, se, steps);
    if (ir.ec != std::errc() || ir.ptr != ie || sr.ec != std::errc() ||
        sr.ptr != se) {
      throw ConfigError("levels", "expected \"NxM\" entries, got '" + token + "'");
    }
    if (intervals < 2 || steps < 2) {
      throw ConfigError("levels", "grid sizes must be at least 2");
    }
    levels.emplace_back(intervals, steps);
    start = end + 1;
  }
  return levels;
}

int run_command(const std::string& command, Config cfg,
                const CommandOptions& options, std::ostream& log) {
  const std::string out_dir = options.out_dir ? *options.out_dir : cfg.out_dir;
  try {
    if (options.out_dir) cfg.out_dir = *options.out_dir;
    if (options.tol) {
      if (!std::isfinite(*options.tol) || *options.tol <= 0.0) {
        throw ConfigError("tol", "must be positive and finite");
      }
      cfg.tol = *options.tol;
    }
    if (options.max_iter) {
      if (*options.max_iter < 1) {
        throw ConfigError("max_iter", "needs at least one iteration");
      }
      cfg.max_iter = *options.max_iter;
    }
    if (options.seed) cfg.seed = *options.seed;
    if (options.levels) cfg.levels = parse_levels(*options.levels);

    if (command == "solve-direct") return cmd_solve_direct(cfg, log);
    if (command == "solve-inverse") return cmd_solve_inverse(cfg, log);
    if (command == "check-k1") return cmd_check_k1(cfg, log);
    if (command == "verify-operators") return cmd_verify_operators(cfg, log);
    if (command == "convergence") return cmd_convergence(cfg, log);
    throw ConfigError("(command)", "unknown command '" + command + "'");
  } catch (const std::exception& e) {
    log << command << ": error: " << e.what() << "\n";
    write_error_summary(out_dir, command, e.what());
    return 1;
  }
}

}  // namespace fracstar
