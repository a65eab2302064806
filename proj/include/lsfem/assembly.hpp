#pragma once

#include <functional>
#include <vector>

#include "lsfem/geometry.hpp"
#include "lsfem/linalg.hpp"
#include "lsfem/space.hpp"

namespace lsfem {

/// Coefficients and data of a convection-diffusion problem
///
///   -div(K grad u) + beta . grad u = f
///
/// in unified form. Stationary problems use K = alpha*I and beta = velocity;
/// space-time problems on a rectangle treat y as time, K = diag(alpha, 0)
/// and beta = (velocity, 1), so the same element kernels cover both.
struct FormDescriptor {
  int dim = 1;
  bool spacetime = false;
  double alpha = 1.0;
  std::function<Vec2(Vec2)> beta;         ///< convection field (time component included)
  std::function<double(Vec2)> f;          ///< load; may be empty for f = 0
  std::function<double(Vec2)> dirichlet_g;  ///< trial boundary data; empty for 0

  std::vector<int> trial_dirichlet_markers;
  std::vector<int> test_dirichlet_markers;

  /// Data behaves like an integrable power singularity at x = 0 (1D);
  /// elements touching the origin switch to the graded quadrature rule.
  bool singular_at_zero = false;

  Mat2 diffusion() const {
    return spacetime ? Mat2::spacetime(alpha) : Mat2::isotropic(alpha);
  }
};

/// Matrix over free dofs plus the right-hand-side contribution moving the
/// interpolated Dirichlet lift of the trial space to the load side:
/// correction[i] = -sum_{constrained j} M_ij g(x_j), length n_free(test).
struct AssembledOperator {
  SparseMatrix matrix;
  std::vector<double> dirichlet_correction;
};

/// a(p, q) = int (K grad p) . grad q on test x trial. The trial space may
/// live on the same mesh or on a coarser mesh the test mesh was refined
/// from; constrained trial dofs are lifted with form.dirichlet_g.
AssembledOperator assemble_diffusion(const FeSpace& test, const FeSpace& trial,
                                     const FormDescriptor& form);

/// b(u, q) = int (K grad u) . grad q + (beta . grad u) q on test x trial.
AssembledOperator assemble_full(const FeSpace& test, const FeSpace& trial,
                                const FormDescriptor& form);

/// <f, q> over free test dofs.
std::vector<double> assemble_load(const FeSpace& test, const FormDescriptor& form);

/// <beta . grad u, q> over free test dofs for a discrete u (all of its
/// coefficients, constrained ones included). Right-hand side of the Riesz
/// representant problem.
std::vector<double> assemble_convective_load(const FeSpace& test, const FeFunction& u,
                                             const FormDescriptor& form);

}  // namespace lsfem
