#pragma once

#include <cstddef>
#include <vector>

#include "fracstar/grid.hpp"

namespace fracstar {

/// Metric star graph: n >= 2 edges joined at a common vertex. Each edge
/// carries its own uniform grid with coordinate 0 at the central vertex and
/// coordinate length at the boundary vertex.
struct StarGraph {
  std::vector<UniformGrid> edges;

  explicit StarGraph(std::vector<UniformGrid> edges);

  std::size_t edge_count() const { return edges.size(); }
  const UniformGrid& edge(std::size_t k) const { return edges[k]; }

  bool operator==(const StarGraph& other) const = default;
};

/// Edge-wise nodal values on a star graph. Every per-edge Series lives on
/// the grid of its edge; the constructor enforces the match.
struct GraphSeries {
  StarGraph graph;
  std::vector<Series> edges;

  GraphSeries(StarGraph graph, std::vector<Series> edges);
  static GraphSeries zeros(const StarGraph& graph);

  Series& edge(std::size_t k) { return edges[k]; }
  const Series& edge(std::size_t k) const { return edges[k]; }
  std::size_t edge_count() const { return edges.size(); }
};

/// Diffusion coefficient gamma on the graph with its global bounds
/// 0 < p1 <= gamma <= p2. Construction verifies the bounds node by node.
struct Coefficients {
  GraphSeries gamma;
  double p1;
  double p2;

  Coefficients(GraphSeries gamma, double p1, double p2);

  const StarGraph& graph() const { return gamma.graph; }
};

/// sum_k int_0^{l_k} f_k dx, trapezoid per edge.
double integrate_graph(const GraphSeries& f);

/// sqrt(sum_k int f_k^2 dx).
double graph_l2_norm(const GraphSeries& f);

/// sum_k int f_k g_k dx; throws std::invalid_argument on shape mismatch.
double graph_inner(const GraphSeries& f, const GraphSeries& g);

/// y += a * x, edge-wise; shapes must match.
void graph_axpy(double a, const GraphSeries& x, GraphSeries& y);

/// Pointwise scale in place.
void graph_scale(double a, GraphSeries& x);

}  // namespace fracstar
