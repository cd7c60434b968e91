#include "fracstar/fracops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracstar {

namespace {

// Kernel moments over the cell [r-1, r] in the scaled variable:
//   u_r = int sigma^{mu-1} dsigma,  v_r = int sigma^{mu-1} (r - sigma) dsigma.
// The product-trapezoid rule is exactly these two moments applied to the
// endpoint values of each cell.
struct KernelMoments {
  std::vector<double> u, v;
};

KernelMoments kernel_moments(double mu, std::size_t cells) {
  KernelMoments km;
  km.u.resize(cells + 1, 0.0);
  km.v.resize(cells + 1, 0.0);
  double prev_p = 0.0;   // (r-1)^mu
  double prev_p1 = 0.0;  // (r-1)^{mu+1}
  for (std::size_t r = 1; r <= cells; ++r) {
    const double rr = static_cast<double>(r);
    const double p = std::pow(rr, mu);
    const double p1 = p * rr;
    km.u[r] = (p - prev_p) / mu;
    km.v[r] = rr * km.u[r] - (p1 - prev_p1) / (mu + 1.0);
    prev_p = p;
    prev_p1 = p1;
  }
  return km;
}

std::vector<double> reflected(const std::vector<double>& v) {
  return std::vector<double>(v.rbegin(), v.rend());
}

std::vector<double> frac_integral_left(const std::vector<double>& f,
                                       double h, double mu) {
  const std::size_t n = f.size() - 1;
  const KernelMoments km = kernel_moments(mu, n);
  const double scale = std::pow(h, mu) / gamma_fn(mu);
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t r = m - j;
      acc += f[j] * (km.u[r] - km.v[r]) + f[j + 1] * km.v[r];
    }
    out[m] = scale * acc;
  }
  return out;
}

std::vector<double> caputo_left(const std::vector<double>& f, double h,
                                double mu) {
  const std::size_t n = f.size() - 1;
  const std::vector<double> a = caputo_weights(mu, n);
  const double scale = std::pow(h, -mu) / gamma_fn(2.0 - mu);
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      acc += a[j] * (f[m - j] - f[m - j - 1]);
    }
    out[m] = scale * acc;
  }
  return out;
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("gamma_fn requires a positive argument, got " +
                            std::to_string(x));
  }
  return std::tgamma(x);
}

std::vector<double> caputo_weights(double alpha, std::size_t count) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("caputo_weights requires alpha in (0, 1)");
  }
  if (count == 0) throw std::invalid_argument("caputo_weights: count == 0");
  const double e = 1.0 - alpha;
  std::vector<double> a(count);
  a[0] = 1.0;
  for (std::size_t j = 1; j < count; ++j) {
    // (j+1)^e - j^e written as j^e expm1(e log1p(1/j)): no cancellation,
    // keeps the sequence strictly decreasing for j well past 10^4.
    const double jj = static_cast<double>(j);
    a[j] = std::pow(jj, e) * std::expm1(e * std::log1p(1.0 / jj));
  }
  return a;
}

Series frac_integral(const Series& f, FracOrder mu, Side side) {
  const double h = f.grid.spacing();
  if (side == Side::Left) {
    return Series(f.grid, frac_integral_left(f.values, h, mu.value()));
  }
  return Series(f.grid,
                reflected(frac_integral_left(reflected(f.values), h,
                                             mu.value())));
}

Series caputo_derivative(const Series& f, FracOrder mu, Side side) {
  const double h = f.grid.spacing();
  if (side == Side::Left) {
    return Series(f.grid, caputo_left(f.values, h, mu.value()));
  }
  return Series(f.grid,
                reflected(caputo_left(reflected(f.values), h, mu.value())));
}

Series rl_derivative_left(const Series& f, FracOrder mu) {
  const Series F = frac_integral(f, FracOrder(1.0 - mu.value()), Side::Left);
  const std::size_t n = f.grid.intervals;
  const double h = f.grid.spacing();
  std::vector<double> out(n + 1);
  out[0] = (-3.0 * F[0] + 4.0 * F[1] - F[2]) / (2.0 * h);
  for (std::size_t i = 1; i < n; ++i) {
    out[i] = (F[i + 1] - F[i - 1]) / (2.0 * h);
  }
  out[n] = (3.0 * F[n] - 4.0 * F[n - 1] + F[n - 2]) / (2.0 * h);
  return Series(f.grid, std::move(out));
}

std::vector<double> singular_weights(const UniformGrid& grid, FracOrder beta) {
  const double b = beta.value();
  const double h = grid.spacing();
  std::vector<double> w(grid.node_count(), 0.0);
  double x1 = 0.0, p1 = 0.0, q1 = 0.0;  // x^b and x^{b+1} at left cell edge
  for (std::size_t j = 0; j < grid.intervals; ++j) {
    const double x2 = grid.node(j + 1);
    const double p2 = std::pow(x2, b);
    const double q2 = p2 * x2;
    const double area = (p2 - p1) / b;                       // int x^{b-1}
    const double tail = ((q2 - q1) / (b + 1.0) - x1 * area) / h;
    w[j] += area - tail;
    w[j + 1] += tail;
    x1 = x2;
    p1 = p2;
    q1 = q2;
  }
  return w;
}

double singular_quadrature(const Series& f, FracOrder beta) {
  const std::vector<double> w = singular_weights(f.grid, beta);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f.values[i];
  return acc;
}

Eigen::MatrixXd frac_integral_matrix(const UniformGrid& grid, FracOrder mu,
                                     Side side) {
  const std::size_t n = grid.intervals;
  const KernelMoments km = kernel_moments(mu.value(), n);
  const double scale = std::pow(grid.spacing(), mu.value()) /
                       gamma_fn(mu.value());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (std::size_t m = 1; m <= n; ++m) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t r = m - j;
      w(m, j) += scale * (km.u[r] - km.v[r]);
      w(m, j + 1) += scale * km.v[r];
    }
  }
  if (side == Side::Left) return w;
  Eigen::MatrixXd wr(n + 1, n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) wr(i, j) = w(n - i, n - j);
  }
  return wr;
}

Eigen::MatrixXd caputo_derivative_matrix(const UniformGrid& grid, FracOrder mu,
                                         Side side) {
  const std::size_t n = grid.intervals;
  const std::vector<double> a = caputo_weights(mu.value(), n);
  const double scale = std::pow(grid.spacing(), -mu.value()) /
                       gamma_fn(2.0 - mu.value());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (std::size_t m = 1; m <= n; ++m) {
    d(m, m) += scale * a[0];
    for (std::size_t j = 1; j < m; ++j) {
      d(m, m - j) += scale * (a[j] - a[j - 1]);
    }
    d(m, 0) -= scale * a[m - 1];
  }
  if (side == Side::Left) return d;
  Eigen::MatrixXd dr(n + 1, n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) dr(i, j) = d(n - i, n - j);
  }
  return dr;
}

}  // namespace fracstar
