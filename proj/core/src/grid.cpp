#include "fracstar/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracstar {

FracOrder::FracOrder(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw std::domain_error("fractional order must lie in (0, 1), got " +
                            std::to_string(value));
  }
}

UniformGrid::UniformGrid(double length_, std::size_t intervals_)
    : length(length_), intervals(intervals_) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("grid length must be positive and finite");
  }
  if (intervals < 2) {
    throw std::invalid_argument("grid needs at least 2 intervals");
  }
}

Series::Series(UniformGrid grid_, std::vector<double> values_)
    : grid(grid_), values(std::move(values_)) {
  if (values.size() != grid.node_count()) {
    throw std::invalid_argument("series size does not match grid node count");
  }
}

Series Series::zeros(const UniformGrid& grid) {
  return Series(grid, std::vector<double>(grid.node_count(), 0.0));
}

TimeGrid::TimeGrid(double horizon_, std::size_t steps_)
    : horizon(horizon_), steps(steps_) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("time horizon must be positive and finite");
  }
  if (steps < 2) {
    throw std::invalid_argument("time grid needs at least 2 steps");
  }
}

TimeSeries::TimeSeries(TimeGrid grid_, std::vector<double> values_)
    : grid(grid_), values(std::move(values_)) {
  if (values.size() != grid.node_count()) {
    throw std::invalid_argument(
        "time series size does not match grid node count");
  }
}

TimeSeries TimeSeries::zeros(const TimeGrid& grid) {
  return TimeSeries(grid, std::vector<double>(grid.node_count(), 0.0));
}

double trapezoid(const Series& f) {
  const std::size_t n = f.grid.intervals;
  double acc = 0.5 * (f.values[0] + f.values[n]);
  for (std::size_t i = 1; i < n; ++i) acc += f.values[i];
  return acc * f.grid.spacing();
}

std::vector<double> trapezoid_weights(const UniformGrid& grid) {
  const double h = grid.spacing();
  std::vector<double> w(grid.node_count(), h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

double time_l2_norm(const TimeSeries& f) {
  const std::size_t m = f.grid.steps;
  const double dt = f.grid.dt();
  double acc = 0.5 * (f.values[0] * f.values[0] + f.values[m] * f.values[m]);
  for (std::size_t i = 1; i < m; ++i) acc += f.values[i] * f.values[i];
  return std::sqrt(acc * dt);
}

}  // namespace fracstar
