#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fracstar/graph.hpp"
#include "fracstar/grid.hpp"
#include "fracstar/verify.hpp"

namespace testsupport {

// Uniform double in [-1, 1] from the high bits, same construction the
// library uses for seeded draws.
inline double unit_draw(std::mt19937_64& rng) {
  return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

inline fracstar::StarGraph star(std::size_t edges, std::size_t intervals) {
  std::vector<fracstar::UniformGrid> grids;
  grids.reserve(edges);
  for (std::size_t k = 0; k < edges; ++k) {
    grids.emplace_back(0.8 + 0.2 * double(k % 3), intervals);
  }
  return fracstar::StarGraph(std::move(grids));
}

// Smooth strictly positive coefficient with per-edge variation.
inline fracstar::CoefficientField wavy_field() {
  return {[](std::size_t k, double x) {
            return 1.0 + 0.3 * std::sin(2.0 * x + double(k));
          },
          0.6, 1.4};
}

inline fracstar::Series sample(const fracstar::UniformGrid& grid,
                               const std::function<double(double)>& f) {
  fracstar::Series out = fracstar::Series::zeros(grid);
  for (std::size_t i = 0; i < grid.node_count(); ++i) out[i] = f(grid.node(i));
  return out;
}

inline double rel_l2(const fracstar::Series& got, const fracstar::Series& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double d = got[i] - want[i];
    num += d * d;
    den += want[i] * want[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double rel_l2(const fracstar::GraphSeries& got,
                     const fracstar::GraphSeries& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < got.edge_count(); ++k) {
    for (std::size_t i = 0; i < got.edge(k).size(); ++i) {
      const double d = got.edge(k)[i] - want.edge(k)[i];
      num += d * d;
      den += want.edge(k)[i] * want.edge(k)[i];
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Random polynomial of the given degree with coefficients in [-1, 1].
inline std::function<double(double)> random_poly(std::mt19937_64& rng,
                                                 int degree) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1);
  for (double& v : c) v = unit_draw(rng);
  return [c](double x) {
    double acc = 0.0, p = 1.0;
    for (double cv : c) {
      acc += cv * p;
      p *= x;
    }
    return acc;
  };
}

}  // namespace testsupport
