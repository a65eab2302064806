#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lsfem/assembly.hpp"
#include "lsfem/lsfem.hpp"
#include "lsfem/mesh.hpp"
#include "lsfem/space.hpp"

namespace lsfem {

/// Named probe evaluated on the trial solution after each level.
using CharacteristicProbe = std::pair<std::string, std::function<double(const FeFunction&)>>;

/// A runnable problem: descriptor, initial meshes, optional closed-form
/// solution and the characteristic values tracked per refinement level.
struct Benchmark {
  std::string name;
  std::string description;
  FormDescriptor descriptor;
  std::function<MeshPtr()> mesh_factory;          ///< coarse start for adaptive runs
  std::function<MeshPtr()> uniform_mesh_factory;  ///< start for uniform studies; empty = mesh_factory
  std::optional<ExactSolution> exact;
  std::vector<CharacteristicProbe> characteristic_extractors;

  // Harness defaults, tuned per problem.
  TestKind default_test_kind = TestKind::p2_same_mesh;
  bool uniform_least_squares = false;  ///< uniform study solves the saddle system instead of the Galerkin one
  int uniform_levels = 8;
  long adaptive_max_dofs = 100000;       ///< short-run budget (saddle total)
  long adaptive_max_dofs_long = 100000;  ///< budget under --long

  MeshPtr initial_mesh(bool uniform) const {
    return uniform && uniform_mesh_factory ? uniform_mesh_factory() : mesh_factory();
  }
};

enum class VelocityChoice { constant, inv_sqrt, inv_x };

/// Smooth manufactured solution on (0,1) with the chosen velocity field;
/// v is the magnitude for VelocityChoice::constant and ignored otherwise.
Benchmark smooth_1d(VelocityChoice choice, double v = 1.0);

/// -eps u'' + u' = 1 on (0,1) with a boundary layer of width ~eps at x = 1.
Benchmark boundary_layer_1d(double epsilon);

/// Rotational transport of a smoothed inlet profile across the unit square,
/// alpha = 1e-5; tracked via outflow layer widths and osc_max.
Benchmark rotating_convection_2d();

/// Flow past a circular obstacle on (-3,9)x(-3,3), alpha = 1e-4; tracked
/// via the upper interior-layer width at x = 4 and osc_max.
Benchmark hemker();

/// Space-time formulation on Q = (0,1)^2 with a spatial layer at x = 1 and
/// a temporal layer at t = 0, both of width ~epsilon.
Benchmark spacetime_layer_1d(double epsilon);

/// Global over/undershoot measure (max u - 1) - min(min u, 0): zero for a
/// profile inside [0,1], positive parts count violations on either side.
/// Scans dof values, plus element centroids for degree 2.
double osc_max(const FeFunction& u);

struct LayerWidths {
  double lower = std::numeric_limits<double>::quiet_NaN();    ///< first in-band run crossed while rising
  double upper = std::numeric_limits<double>::quiet_NaN();    ///< the matching run crossed while falling
  double profile = std::numeric_limits<double>::quiet_NaN();  ///< measure of {u >= band_low}
};

/// Samples u at uniform spacing along the segment [a, b] and measures where
/// the profile crosses the band [band_low, band_high]. NaN marks a feature
/// the profile does not show; throws std::runtime_error when u never enters
/// the band at all.
LayerWidths layer_widths(const FeFunction& u, Vec2 a, Vec2 b, double band_low = 0.1,
                         double band_high = 0.9, int samples = 100000);

/// Pointwise strong-form residual -div(K grad u) + beta . grad u - f of the
/// manufactured solution; vanishes when exact solution and load agree.
double strong_residual(const Benchmark& b, Vec2 x);

/// All benchmarks in their fixed CLI order.
const std::vector<Benchmark>& benchmark_registry();

/// Lookup by id; nullptr when unknown.
const Benchmark* find_benchmark(const std::string& name);

}  // namespace lsfem
