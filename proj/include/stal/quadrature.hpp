#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Deterministic quadrature pieces: compensated accumulation in index order,
// Gauss-Legendre nodes, a product rule on the sphere, and polynomial
// extrapolation of a radius family to its limit.

namespace stal {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

struct QuadNode {
  double x = 0.0;
  double w = 0.0;
};

// Nodes and weights on [-1, 1]; Newton refinement of the Chebyshev seed
// against the Legendre recurrence. Exact for polynomials of degree 2n-1.
inline std::vector<QuadNode> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  std::vector<QuadNode> out;
  out.resize(std::size_t(n));
  for (int k = 0; k < n; ++k) {
    long double x = std::cos(M_PI * (long double)(k + 0.75L) / ((long double)n + 0.5L));
    long double dp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = x;
      for (int j = 2; j <= n; ++j) {
        long double p2 = ((2.0L * j - 1.0L) * x * p1 - (j - 1.0L) * p0) / (long double)j;
        p0 = p1;
        p1 = p2;
      }
      dp = (long double)n * (x * p1 - p0) / (x * x - 1.0L);
      long double dx = p1 / dp;
      x -= dx;
      if (std::fabs((double)dx) < 1e-16) break;
    }
    out[std::size_t(k)].x = (double)x;
    out[std::size_t(k)].w = (double)(2.0L / ((1.0L - x * x) * dp * dp));
  }
  return out;
}

struct SphereNode {
  double nx = 0.0, ny = 0.0, nz = 0.0;  // outward unit normal
  double w = 0.0;                       // unit-sphere area weight
};

// Product rule: Gauss-Legendre in the polar cosine, uniform trapezoid in
// azimuth with 2*order points. Weights sum to the unit-sphere area.
inline std::vector<SphereNode> sphere_rule(int order) {
  std::vector<QuadNode> gl = gauss_legendre(order);
  int nphi = 2 * order;
  double wphi = 2.0 * M_PI / double(nphi);
  std::vector<SphereNode> out;
  out.reserve(std::size_t(order * nphi));
  for (int k = 0; k < order; ++k) {
    double u = gl[std::size_t(k)].x;
    double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (int j = 0; j < nphi; ++j) {
      double phi = (2.0 * M_PI * double(j)) / double(nphi);
      SphereNode n;
      n.nx = s * std::cos(phi);
      n.ny = s * std::sin(phi);
      n.nz = u;
      n.w = gl[std::size_t(k)].w * wphi;
      out.push_back(n);
    }
  }
  return out;
}

// Neville tableau for the value at t = 0 of the polynomial through
// (t_i, y_i); used with t = 1/radius to reach the large-radius limit.
inline double neville_limit(const std::vector<double>& t,
                            const std::vector<double>& y) {
  if (t.size() != y.size() || t.empty())
    throw std::invalid_argument("extrapolation needs matching nonempty data");
  std::vector<double> p = y;
  std::size_t n = t.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i) {
      double denom = t[i] - t[i + level];
      if (denom == 0.0) throw std::invalid_argument("repeated extrapolation node");
      p[i] = ((0.0 - t[i + level]) * p[i] - (0.0 - t[i]) * p[i + 1]) / denom;
    }
  return p[0];
}

// Least-squares slope of log|y| against log x over the pairs with |y| above
// the floor; NaN when fewer than two pairs survive.
inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y, double floor = 1e-13) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(std::fabs(y[i]) > floor) || !(x[i] > 0.0)) continue;
    double lx = std::log(x[i]);
    double ly = std::log(std::fabs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  double denom = double(n) * sxx - sx * sx;
  if (denom == 0.0) return std::nan("");
  return (double(n) * sxy - sx * sy) / denom;
}

}  // namespace stal
