#pragma once

#include <vector>

#include "lsfem/geometry.hpp"

namespace lsfem {

/// Quadrature rule on the reference element: the unit interval [0,1]
/// (points carry xi in x, y unused) or the unit triangle with vertices
/// (0,0), (1,0), (0,1). Weights sum to the reference measure (1 or 1/2).
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int order = 0;  ///< polynomial exactness degree
};

enum class CoefficientKind { smooth, singular };

/// n-point Gauss-Legendre rule on [0,1]; exact for degree 2n-1.
QuadratureRule gauss_legendre_01(int n);

/// Tensor-collapsed (Duffy) rule on the unit triangle, exact for total
/// degree >= order. All weights positive.
QuadratureRule triangle_rule(int order);

/// Composite Gauss rule on [0,1] geometrically graded toward xi = 0,
/// accurate for integrable endpoint singularities such as x^{-1/2}.
/// With toward_one the grading is mirrored toward xi = 1.
QuadratureRule graded_segment_rule(bool toward_one = false);

/// Rule exact for degree >= degree_trial + degree_test + 2 on the element
/// type given by dim. CoefficientKind::singular selects the graded segment
/// rule (1D only).
QuadratureRule default_quadrature(int degree_trial, int degree_test, int dim,
                                  CoefficientKind kind = CoefficientKind::smooth);

}  // namespace lsfem
