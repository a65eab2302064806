#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lsfem/assembly.hpp"
#include "lsfem/linalg.hpp"
#include "lsfem/report.hpp"
#include "lsfem/space.hpp"

namespace lsfem {

/// Marks a sharp solution feature near coordinate[axis] == position with
/// width ~scale. Error quadrature subdivides cells intersecting the band
/// until they resolve the scale, so unresolved layers cannot be missed by
/// a fixed-order rule.
struct LayerHint {
  int axis = 0;  ///< 0: x, 1: y/time
  double position = 0.0;
  double scale = 1.0;
};

/// Closed-form solution of a benchmark. gradient carries the full gradient
/// (the time derivative sits in the y slot for space-time problems);
/// div_k_grad = div(K grad u) supports strong-form residual spot checks.
struct ExactSolution {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
  std::function<double(Vec2)> div_k_grad;
  std::vector<LayerHint> layers;
};

/// Galerkin solution of b(u, q) = <f, q> with test space = trial space.
FeFunction solve_direct(const FormDescriptor& form, const SpacePtr& trial);

/// w in the test space with (K grad w, grad q) = (beta . grad u, q) for all
/// free test q; the discrete Riesz representant of the convective derivative.
FeFunction riesz_representant(const FeFunction& u, const FormDescriptor& form,
                              const SpacePtr& test);

struct DiscreteXNorm {
  double y_part = 0.0;  ///< ||u||_Y = sqrt(int (K grad u) . grad u)
  double w_part = 0.0;  ///< ||w_u||_Y of the Riesz representant
  double total = 0.0;   ///< sqrt(y_part^2 + w_part^2)
};

DiscreteXNorm discrete_xnorm(const FeFunction& u, const FormDescriptor& form,
                             const SpacePtr& test);

/// Error norms against an exact solution. Integration is adaptive per
/// element (recursive subdivision) so unresolved layers are still captured.
double y_norm_error(const FeFunction& u, const ExactSolution& exact, const FormDescriptor& form);
double l2_norm_error(const FeFunction& u, const ExactSolution& exact);
DiscreteXNorm discrete_xnorm_error(const FeFunction& u, const ExactSolution& exact,
                                   const FormDescriptor& form, const SpacePtr& test);

struct LsSolveResult {
  FeFunction u;  ///< trial-space solution u_H
  FeFunction p;  ///< test-space adjoint p_h (the built-in estimator)
  double eta_global = 0.0;
  std::vector<double> eta_local;  ///< per trial element, child contributions summed into parents
  LinearSolveReport solve_report;
};

/// Mixed solve of the saddle system [[A, B], [B^T, 0]] (p, u) = (f, 0).
LsSolveResult solve_least_squares(const FormDescriptor& form, const SpacePtr& trial,
                                  const SpacePtr& test);

/// Minimal-cardinality bulk marking: greedy by descending indicator (ties by
/// lower index) until sum of marked eta^2 >= theta * total. Ascending result.
std::vector<int> dorfler_mark(const std::vector<double>& eta_local, double theta);

enum class TestKind { p2_same_mesh, p1_refined_mesh };

/// P2 on the trial mesh or P1 on its uniform refinement.
SpacePtr make_test_space(const MeshPtr& trial_mesh, TestKind kind,
                         const std::vector<int>& test_dirichlet_markers);

struct LevelHookData {
  int level;
  MeshPtr mesh;
  const FeFunction* u;
  const FeFunction* p;  ///< null for direct solves
};

struct AdaptiveConfig {
  double theta = 0.5;
  int max_levels = 200;
  long max_dofs = 100000;  ///< saddle total (trial + test dofs); row recorded, then loop stops
  TestKind test_kind = TestKind::p2_same_mesh;
  const ExactSolution* exact = nullptr;
  std::vector<std::pair<std::string, std::function<double(const FeFunction&)>>> extractors;
  std::function<void(const LevelHookData&)> on_level;
};

/// Solve -> estimate -> mark -> refine (newest vertex bisection) loop with
/// per-level bookkeeping. Trial space is P1 throughout.
AdaptiveReport adaptive_solve(const FormDescriptor& form, const MeshPtr& initial_mesh,
                              const AdaptiveConfig& config);

struct UniformConfig {
  int levels = 8;
  bool least_squares = false;  ///< false: direct Galerkin (dofs column = trial dofs)
  TestKind test_kind = TestKind::p2_same_mesh;
  const ExactSolution* exact = nullptr;
  std::vector<std::pair<std::string, std::function<double(const FeFunction&)>>> extractors;
  std::function<void(const LevelHookData&)> on_level;
};

/// Convergence study under uniform refinement.
AdaptiveReport uniform_study(const FormDescriptor& form, const MeshPtr& initial_mesh,
                             const UniformConfig& config);

}  // namespace lsfem
