#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "fracstar/grid.hpp"

namespace fracstar {

/// Orientation of a fractional operator: Left anchors the memory kernel at
/// x = 0, Right anchors it at x = length.
enum class Side { Left, Right };

/// Gamma function; throws std::domain_error for arguments <= 0.
double gamma_fn(double x);

/// L1 weights a_j = (j+1)^{1-alpha} - j^{1-alpha}, j = 0..count-1.
/// Evaluated in a cancellation-free form for large j, so the sequence stays
/// positive and strictly decreasing at any count.
std::vector<double> caputo_weights(double alpha, std::size_t count);

/// Fractional integral of order mu via product-trapezoid quadrature:
/// the piecewise-linear interpolant of f is integrated exactly against the
/// power kernel. Left: (1/Gamma(mu)) int_0^x (x-s)^{mu-1} f(s) ds.
Series frac_integral(const Series& f, FracOrder mu, Side side);

/// Caputo derivative of order mu via the L1 scheme. Exactly zero (bitwise)
/// for constant input. The right-sided variant is the mirror image; its
/// value at the anchor node (x = length) is an empty sum and reported as 0.
Series caputo_derivative(const Series& f, FracOrder mu, Side side);

/// Left Riemann-Liouville derivative: second-order difference of the
/// (1-mu)-integral. Finite at interior nodes even when f(0) != 0.
Series rl_derivative_left(const Series& f, FracOrder mu);

/// int_0^L x^{beta-1} f(x) dx with f piecewise linear; the kernel factor is
/// integrated in closed form per cell, so the endpoint singularity at x = 0
/// costs no accuracy.
double singular_quadrature(const Series& f, FracOrder beta);

/// Node weights for singular_quadrature: the quadrature equals w . f.values.
std::vector<double> singular_weights(const UniformGrid& grid, FracOrder beta);

/// Dense matrix W with (W f)_i = frac_integral(f, mu, side)[i].
Eigen::MatrixXd frac_integral_matrix(const UniformGrid& grid, FracOrder mu,
                                     Side side);

/// Dense matrix D with (D f)_i = caputo_derivative(f, mu, side)[i].
Eigen::MatrixXd caputo_derivative_matrix(const UniformGrid& grid, FracOrder mu,
                                         Side side);

}  // namespace fracstar
