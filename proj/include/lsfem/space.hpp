#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "lsfem/mesh.hpp"

namespace lsfem {

/// Continuous Lagrange space of degree 1 or 2. Dof numbering is
/// deterministic: vertex dofs in vertex-index order, then (degree 2) one
/// dof per edge in lexicographic order of the sorted endpoint pair.
struct FeSpace {
  MeshPtr mesh;
  int degree = 1;
  std::vector<int> dirichlet_markers;

  std::vector<Vec2> dof_coords;
  int local_dofs = 2;              ///< dofs per element
  std::vector<int> element_dofs;   ///< flattened, n_elements x local_dofs
  std::vector<char> is_dirichlet;  ///< per dof
  std::vector<int> free_index;     ///< dof -> position among free dofs, -1 when constrained
  std::vector<int> free_dofs;      ///< inverse of free_index
  /// Degree 2 only: edge_key(a,b) -> global dof of the edge midpoint.
  std::unordered_map<std::uint64_t, int> edge_dofs;

  std::shared_ptr<const ElementLocator> point_locator;

  int n_dofs() const { return static_cast<int>(dof_coords.size()); }
  int n_free() const { return static_cast<int>(free_dofs.size()); }
  const int* dofs_of(int e) const { return element_dofs.data() + e * local_dofs; }
};

using SpacePtr = std::shared_ptr<const FeSpace>;

SpacePtr build_space(const MeshPtr& mesh, int degree, const std::vector<int>& dirichlet_markers);

struct FeFunction {
  SpacePtr space;
  std::vector<double> coefficients;
};

FeFunction zero_function(const SpacePtr& space);

/// Number of local basis functions for the given element type and degree.
int shape_count(int dim, int degree);
/// Basis values at a reference point (unit interval / unit triangle).
void shape_values(int dim, int degree, Vec2 ref, double* values);
/// Basis gradients in reference coordinates at a reference point.
void shape_ref_gradients(int dim, int degree, Vec2 ref, Vec2* grads);

/// Affine map between the reference element and a mesh element.
struct ElementMap {
  int dim = 1;
  Vec2 v0;
  double j00 = 1.0, j01 = 0.0, j10 = 0.0, j11 = 1.0;  ///< Jacobian columns (v1-v0 | v2-v0)
  double det = 1.0;  ///< 1D: element length, 2D: twice the area

  Vec2 to_physical(Vec2 ref) const {
    if (dim == 1) return {v0.x + j00 * ref.x, 0.0};
    return {v0.x + j00 * ref.x + j01 * ref.y, v0.y + j10 * ref.x + j11 * ref.y};
  }
  /// Applies J^{-T} to a reference gradient.
  Vec2 push_gradient(Vec2 g) const {
    if (dim == 1) return {g.x / j00, 0.0};
    return {(j11 * g.x - j10 * g.y) / det, (-j01 * g.x + j00 * g.y) / det};
  }
};

ElementMap element_map(const SimplicialMesh& mesh, int e);

/// Reference coordinates of a point given its barycentric coordinates.
inline Vec2 ref_from_barycentric(int dim, const std::array<double, 3>& bc) {
  return dim == 1 ? Vec2{bc[1], 0.0} : Vec2{bc[1], bc[2]};
}

/// Point evaluation; throws std::runtime_error when the point lies outside
/// the mesh (barycentric tolerance 1e-12).
double evaluate(const FeFunction& f, Vec2 point);
/// Same, reusing a locator walk hint for coherent sample sequences.
double evaluate(const FeFunction& f, Vec2 point, int& hint);

/// Nodal interpolation: coefficients = g(dof_coords).
FeFunction interpolate(const SpacePtr& space, const std::function<double(Vec2)>& g);

/// Re-expresses a function on a space whose mesh refines the source mesh.
/// Exact for nested Lagrange spaces of the same (or higher) degree.
FeFunction prolongate(const FeFunction& coarse, const SpacePtr& fine);

}  // namespace lsfem
