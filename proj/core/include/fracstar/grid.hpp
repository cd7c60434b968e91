#pragma once

#include <cstddef>
#include <vector>

namespace fracstar {

/// Fractional order restricted to (0, 1). Construction validates the range,
/// so downstream quadrature code never has to re-check it.
class FracOrder {
 public:
  explicit FracOrder(double value);
  double value() const { return value_; }

 private:
  double value_;
};

/// Uniform 1-d grid on [0, length] with `intervals` cells.
/// node(0) == 0 and node(intervals) == length exactly.
struct UniformGrid {
  double length;
  std::size_t intervals;

  UniformGrid(double length, std::size_t intervals);

  double spacing() const { return length / static_cast<double>(intervals); }
  std::size_t node_count() const { return intervals + 1; }
  double node(std::size_t i) const {
    return length * static_cast<double>(i) / static_cast<double>(intervals);
  }

  bool operator==(const UniformGrid& other) const = default;
};

/// Nodal values of a scalar function on a UniformGrid.
struct Series {
  UniformGrid grid;
  std::vector<double> values;

  Series(UniformGrid grid, std::vector<double> values);
  static Series zeros(const UniformGrid& grid);

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// Uniform time grid on [0, horizon] with `steps` implicit steps;
/// node(0) = 0 is the initial datum, node(steps) = horizon.
struct TimeGrid {
  double horizon;
  std::size_t steps;

  TimeGrid(double horizon, std::size_t steps);

  double dt() const { return horizon / static_cast<double>(steps); }
  std::size_t node_count() const { return steps + 1; }
  double node(std::size_t m) const {
    return horizon * static_cast<double>(m) / static_cast<double>(steps);
  }
  UniformGrid as_spatial() const { return UniformGrid(horizon, steps); }

  bool operator==(const TimeGrid& other) const = default;
};

/// Nodal values of a scalar function of time.
struct TimeSeries {
  TimeGrid grid;
  std::vector<double> values;

  TimeSeries(TimeGrid grid, std::vector<double> values);
  static TimeSeries zeros(const TimeGrid& grid);

  double operator[](std::size_t m) const { return values[m]; }
  double& operator[](std::size_t m) { return values[m]; }
  std::size_t size() const { return values.size(); }
};

/// Trapezoid rule over the whole grid.
double trapezoid(const Series& f);

/// Trapezoid weights w with trapezoid(f) == sum_i w[i] f[i].
std::vector<double> trapezoid_weights(const UniformGrid& grid);

/// Discrete L2 norm over [0, T]: sqrt(sum_m w_m f_m^2) with trapezoid weights.
double time_l2_norm(const TimeSeries& f);

}  // namespace fracstar
