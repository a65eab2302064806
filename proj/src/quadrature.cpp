#include "lsfem/quadrature.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace lsfem {

namespace {

// Legendre polynomial P_n and derivative at x via the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = (n == 0) ? p0 : p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: need n >= 1");
  QuadratureRule rule;
  rule.order = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root of P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - i] = {0.5 * (x + 1.0), 0.0};
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule triangle_rule(int order) {
  if (order < 0) throw std::invalid_argument("triangle_rule: negative order");
  // Duffy transform x = u, y = v(1-u): the integrand picks up one extra
  // degree in u plus the Jacobian factor (1-u).
  const int n = (order + 2 + 1) / 2;
  QuadratureRule g = gauss_legendre_01(n);
  QuadratureRule rule;
  rule.order = order;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double u = g.points[i].x, v = g.points[j].x;
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

QuadratureRule graded_segment_rule(bool toward_one) {
  // Geometric subdivision toward the singular endpoint; 8-point Gauss per
  // cell keeps the composite error below 1e-8 for x^{-1/2}-type kernels.
  const int cells = 9;
  const double ratio = 0.15;
  const QuadratureRule g = gauss_legendre_01(8);
  QuadratureRule rule;
  rule.order = g.order;
  double right = 1.0;
  for (int c = 0; c < cells; ++c) {
    double left = (c + 1 == cells) ? 0.0 : right * ratio;
    for (std::size_t q = 0; q < g.points.size(); ++q) {
      double xi = left + g.points[q].x * (right - left);
      if (toward_one) xi = 1.0 - xi;
      rule.points.push_back({xi, 0.0});
      rule.weights.push_back(g.weights[q] * (right - left));
    }
    right = left;
  }
  return rule;
}

QuadratureRule default_quadrature(int degree_trial, int degree_test, int dim,
                                  CoefficientKind kind) {
  const int order = degree_trial + degree_test + 2;
  if (dim == 1) {
    if (kind == CoefficientKind::singular) return graded_segment_rule();
    return gauss_legendre_01(order / 2 + 1);
  }
  assert(dim == 2);
  if (kind == CoefficientKind::singular)
    throw std::invalid_argument("default_quadrature: singular rules are 1D only");
  return triangle_rule(order);
}

}  // namespace lsfem
