#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "fracstar/verify.hpp"
#include "support.hpp"

using namespace fracstar;
using testsupport::star;
using testsupport::wavy_field;

TEST_CASE("conforming profiles satisfy the discrete vertex rows exactly") {
  const StarGraph graph = star(3, 16);
  const CoefficientField field = wavy_field();
  std::vector<double> gamma0(graph.edge_count());
  for (std::size_t k = 0; k < gamma0.size(); ++k) gamma0[k] = field.gamma(k, 0.0);

  const std::vector<EdgePoly> raw = random_edge_polys(graph, 7);
  const SpatialProfile prof = conforming_profile(graph, gamma0, raw);
  const GraphSeries phi = prof.sample_phi(graph);

  double flux = 0.0;
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    // boundary row: b + trapezoid(phi_k) = 0 on the discrete grid
    CHECK(std::abs(prof.b + trapezoid(phi.edge(k))) <= 1e-13);
    flux += gamma0[k] * phi.edge(k)[0];
  }
  CHECK(std::abs(flux) <= 1e-13);

  CHECK_THROWS_AS(conforming_profile(graph, {1.0, 1.0}, raw),
                  std::invalid_argument);
}

TEST_CASE("boundary profiles keep the prescribed vertex coefficient") {
  const StarGraph graph = star(4, 12);
  const std::vector<EdgePoly> raw = random_edge_polys(graph, 11);
  const SpatialProfile prof = boundary_profile(graph, 2.5, raw);
  CHECK(prof.b == 2.5);
  const GraphSeries phi = prof.sample_phi(graph);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    CHECK(std::abs(2.5 + trapezoid(phi.edge(k))) <= 1e-13);
  }
}

TEST_CASE("closed-form regular part matches the discrete fractional integral") {
  const StarGraph graph = star(2, 128);
  const FracOrder beta(0.75);
  const std::vector<EdgePoly> raw = random_edge_polys(graph, 5);
  const SpatialProfile prof = boundary_profile(graph, 0.7, raw);

  const GraphSeries exact = prof.exact_regular(graph, beta);
  const GraphSeries phi = prof.sample_phi(graph);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const Series got = frac_integral(phi.edge(k), beta, Side::Left);
    CHECK(testsupport::rel_l2(got, exact.edge(k)) < 1e-2);
  }
}

TEST_CASE("time profile and its Caputo derivative follow the power rule") {
  const ManufacturedDirect md =
      manufactured_direct(star(2, 8), wavy_field(), FracOrder(0.5),
                          FracOrder(0.75), 2.0, TimeGrid(1.0, 4), 3);
  CHECK(md.tau(1.5) == doctest::Approx(2.25).epsilon(1e-15));
  // Gamma(3) / Gamma(2.5)
  CHECK(md.dtau(1.0) ==
        doctest::Approx(1.50450555612735010).epsilon(1e-14));
  CHECK(md.dtau(0.0) == 0.0);
}

TEST_CASE("time profile exponents below two are rejected") {
  CHECK_THROWS_AS(
      manufactured_direct(star(2, 8), wavy_field(), FracOrder(0.5),
                          FracOrder(0.75), 1.5, TimeGrid(1.0, 4), 3),
      std::invalid_argument);
}

TEST_CASE("zero spatial profile manufactures the zero problem") {
  const StarGraph graph = star(3, 12);
  SpatialProfile zero;
  zero.b = 0.0;
  zero.phi.assign(graph.edge_count(), EdgePoly{{0.0}});
  const ManufacturedDirect md =
      manufactured_direct_from(graph, wavy_field(), FracOrder(0.4),
                               FracOrder(0.8), 2.0, TimeGrid(1.0, 6), zero);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    for (std::size_t i = 0; i < md.exact_reg.edge(k).size(); ++i) {
      CHECK(md.exact_reg.edge(k)[i] == 0.0);
      CHECK(md.lu_oracle.edge(k)[i] == 0.0);
    }
  }
  const DirectSolution sol = solve_direct(md.problem);
  for (std::size_t m = 0; m <= md.problem.time.steps; ++m) {
    CHECK(sol.steps[m].vertex_coeff == 0.0);
  }
  CHECK(manufactured_error(md, sol) == 0.0);
}

namespace {

// Hand-built solution carrying the exact density tau(t) phi. Its only
// defect against the closed-form regular part is the quadrature of the
// discrete left integral, so the error isolates spatial quadrature.
double handbuilt_error(std::size_t intervals) {
  const ManufacturedDirect md =
      manufactured_direct(star(3, intervals), wavy_field(), FracOrder(0.5),
                          FracOrder(0.75), 2.0, TimeGrid(1.0, 8), 21);
  const TimeGrid& time = md.problem.time;
  const GraphSeries phi =
      md.profile.sample_phi(md.problem.coeff.graph());
  std::vector<SingularRepresentation> steps;
  for (std::size_t m = 0; m <= time.steps; ++m) {
    const double s = md.tau(time.node(m));
    GraphSeries dens = phi;
    graph_scale(s, dens);
    steps.emplace_back(md.problem.coeff.graph(), md.problem.beta,
                       s * md.profile.b, std::move(dens));
  }
  const DirectSolution exact{time, std::move(steps), {}, {}};
  return manufactured_error(md, exact);
}

}  // namespace

TEST_CASE("manufactured error sees only quadrature on the exact density") {
  const double coarse = handbuilt_error(16);
  const double fine = handbuilt_error(32);
  CHECK(coarse < 1e-2);
  CHECK(fine < coarse);
}

TEST_CASE("convergence studies validate their level ladders") {
  const LevelError one = [](std::size_t, std::size_t) { return 1.0; };
  CHECK_THROWS_AS(convergence_study(one, {{8, 8}, {16, 16}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(one, {{8, 8}, {16, 8}, {48, 16}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(one, {{8, 8}, {8, 8}, {16, 16}}),
                  std::invalid_argument);
}

TEST_CASE("convergence studies report observed orders and monotonicity") {
  const LevelError family = [](std::size_t n, std::size_t m) {
    return 1.0 / static_cast<double>(n * m);
  };
  const ConvergenceTable table =
      convergence_study(family, {{8, 8}, {16, 16}, {32, 32}});
  CHECK(table.monotone);
  CHECK_FALSE(table.levels[0].order_defined);
  for (std::size_t l = 1; l < table.levels.size(); ++l) {
    REQUIRE(table.levels[l].order_defined);
    CHECK(table.levels[l].observed_order == doctest::Approx(2.0).epsilon(1e-12));
  }
  const std::string csv = convergence_csv(table);
  CHECK(csv.rfind("N,M,error,order\n", 0) == 0);
  CHECK(csv.find("na") != std::string::npos);
}

TEST_CASE("flat error histories have undefined orders in the csv") {
  const LevelError flat = [](std::size_t, std::size_t) { return 0.0; };
  const ConvergenceTable table =
      convergence_study(flat, {{8, 8}, {16, 16}, {32, 32}});
  CHECK_FALSE(table.monotone);
  for (const ConvergenceLevel& l : table.levels) CHECK_FALSE(l.order_defined);
  const std::string csv = convergence_csv(table);
  std::size_t nas = 0;
  for (std::size_t pos = csv.find("na"); pos != std::string::npos;
       pos = csv.find("na", pos + 1)) {
    ++nas;
  }
  CHECK(nas == 3);
}

TEST_CASE("refined oracles reproduce the direct rule at factor one") {
  const UniformGrid grid(1.0, 48);
  const auto f = [](double x) { return std::sin(2.0 * x) + 0.25 * x; };
  Series nodal = Series::zeros(grid);
  for (std::size_t i = 0; i < grid.node_count(); ++i) nodal[i] = f(grid.node(i));

  for (Side side : {Side::Left, Side::Right}) {
    const Series direct = frac_integral(nodal, FracOrder(0.6), side);
    const Series oracle = refined_frac_integral(f, grid, FracOrder(0.6), side, 1);
    for (std::size_t i = 0; i < grid.node_count(); ++i)
      CHECK(oracle[i] == direct[i]);
  }
  CHECK(refined_singular_quadrature(f, grid, FracOrder(0.75), 1) ==
        singular_quadrature(nodal, FracOrder(0.75)));
  CHECK_THROWS_AS(refined_frac_integral(f, grid, FracOrder(0.6), Side::Left, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(refined_caputo_derivative(f, grid, FracOrder(0.6),
                                            Side::Left, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(refined_singular_quadrature(f, grid, FracOrder(0.75), 0),
                  std::invalid_argument);
}

TEST_CASE("refined oracles tighten as the factor doubles") {
  const UniformGrid grid(1.0, 64);
  const auto f = [](double x) { return std::sin(2.0 * x); };
  const FracOrder mu(0.6);
  for (Side side : {Side::Left, Side::Right}) {
    const Series r1 = refined_frac_integral(f, grid, mu, side, 1);
    const Series r2 = refined_frac_integral(f, grid, mu, side, 2);
    const Series r4 = refined_frac_integral(f, grid, mu, side, 4);
    double d12 = 0.0, d24 = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      d12 += (r1[i] - r2[i]) * (r1[i] - r2[i]);
      d24 += (r2[i] - r4[i]) * (r2[i] - r4[i]);
    }
    CHECK(d24 < d12);
  }
}

TEST_CASE("seeded polynomial draws are reproducible") {
  const StarGraph graph = star(3, 8);
  const std::vector<EdgePoly> a = random_edge_polys(graph, 123, 5, 2.0);
  const std::vector<EdgePoly> b = random_edge_polys(graph, 123, 5, 2.0);
  const std::vector<EdgePoly> c = random_edge_polys(graph, 124, 5, 2.0);
  REQUIRE(a.size() == graph.edge_count());
  REQUIRE(a[0].c.size() == 6);
  bool same = true, diff = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t p = 0; p < a[k].c.size(); ++p) {
      same = same && a[k].c[p] == b[k].c[p];
      diff = diff || a[k].c[p] != c[k].c[p];
      CHECK(std::abs(a[k].c[p]) <= 2.0);
    }
  }
  CHECK(same);
  CHECK(diff);
  CHECK_THROWS_AS(random_edge_polys(graph, 1, -1), std::invalid_argument);
}

TEST_CASE("midpoint interpolation of a linear source matches the callable") {
  const TimeGrid time(1.0, 16);
  TimeSeries f_true = TimeSeries::zeros(time);
  for (std::size_t m = 0; m < f_true.size(); ++m)
    f_true[m] = 1.0 + time.node(m);
  const StarGraph graph = star(3, 16);
  const ManufacturedInverse interp = manufactured_inverse(
      graph, wavy_field(), FracOrder(0.5), FracOrder(0.75), f_true, 42);
  const ManufacturedInverse exact = manufactured_inverse(
      graph, wavy_field(), FracOrder(0.5), FracOrder(0.75), f_true, 42,
      [](double t) { return 1.0 + t; });
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < interp.problem.psi.size(); ++m) {
    const double d = interp.problem.psi[m] - exact.problem.psi[m];
    num += d * d;
    den += exact.problem.psi[m] * exact.problem.psi[m];
  }
  CHECK(std::sqrt(num / (den + 1e-300)) < 1e-12);
}
