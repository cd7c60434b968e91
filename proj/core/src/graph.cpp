#include "fracstar/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace fracstar {

namespace {

void require_same_shape(const GraphSeries& a, const GraphSeries& b) {
  if (a.edge_count() != b.edge_count()) {
    throw std::invalid_argument("graph series edge counts differ");
  }
  for (std::size_t k = 0; k < a.edge_count(); ++k) {
    if (!(a.edge(k).grid == b.edge(k).grid)) {
      throw std::invalid_argument("graph series edge grids differ");
    }
  }
}

}  // namespace

StarGraph::StarGraph(std::vector<UniformGrid> edges_)
    : edges(std::move(edges_)) {
  if (edges.size() < 2) {
    throw std::invalid_argument("star graph needs at least 2 edges");
  }
}

GraphSeries::GraphSeries(StarGraph graph_, std::vector<Series> edges_)
    : graph(std::move(graph_)), edges(std::move(edges_)) {
  if (edges.size() != graph.edge_count()) {
    throw std::invalid_argument("graph series edge count mismatch");
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!(edges[k].grid == graph.edge(k))) {
      throw std::invalid_argument("graph series grid mismatch on an edge");
    }
  }
}

GraphSeries GraphSeries::zeros(const StarGraph& graph) {
  std::vector<Series> e;
  e.reserve(graph.edge_count());
  for (const UniformGrid& g : graph.edges) e.push_back(Series::zeros(g));
  return GraphSeries(graph, std::move(e));
}

Coefficients::Coefficients(GraphSeries gamma_, double p1_, double p2_)
    : gamma(std::move(gamma_)), p1(p1_), p2(p2_) {
  if (!(p1 > 0.0) || !(p2 >= p1)) {
    throw std::invalid_argument("coefficient bounds need 0 < p1 <= p2");
  }
  for (const Series& e : gamma.edges) {
    for (double v : e.values) {
      if (!(v >= p1 && v <= p2)) {
        throw std::invalid_argument(
            "gamma leaves the declared [p1, p2] envelope");
      }
    }
  }
}

double integrate_graph(const GraphSeries& f) {
  double acc = 0.0;
  for (const Series& e : f.edges) acc += trapezoid(e);
  return acc;
}

double graph_l2_norm(const GraphSeries& f) {
  double acc = 0.0;
  for (const Series& e : f.edges) {
    const std::size_t n = e.grid.intervals;
    double edge_acc = 0.5 * (e[0] * e[0] + e[n] * e[n]);
    for (std::size_t i = 1; i < n; ++i) edge_acc += e[i] * e[i];
    acc += edge_acc * e.grid.spacing();
  }
  return std::sqrt(acc);
}

double graph_inner(const GraphSeries& f, const GraphSeries& g) {
  require_same_shape(f, g);
  double acc = 0.0;
  for (std::size_t k = 0; k < f.edge_count(); ++k) {
    const Series& a = f.edge(k);
    const Series& b = g.edge(k);
    const std::size_t n = a.grid.intervals;
    double edge_acc = 0.5 * (a[0] * b[0] + a[n] * b[n]);
    for (std::size_t i = 1; i < n; ++i) edge_acc += a[i] * b[i];
    acc += edge_acc * a.grid.spacing();
  }
  return acc;
}

void graph_axpy(double a, const GraphSeries& x, GraphSeries& y) {
  require_same_shape(x, y);
  for (std::size_t k = 0; k < x.edge_count(); ++k) {
    const std::vector<double>& xv = x.edge(k).values;
    std::vector<double>& yv = y.edge(k).values;
    for (std::size_t i = 0; i < xv.size(); ++i) yv[i] += a * xv[i];
  }
}

void graph_scale(double a, GraphSeries& x) {
  for (Series& e : x.edges) {
    for (double& v : e.values) v *= a;
  }
}

}  // namespace fracstar
