#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lsfem/geometry.hpp"

namespace lsfem {

enum class BcKind { dirichlet, neumann };

struct CircleProjection {
  Vec2 center;
  double radius = 1.0;
};

struct BoundaryMarker {
  int id = 0;
  BcKind kind = BcKind::dirichlet;
  std::optional<CircleProjection> projection;
};

/// Boundary facet: a single vertex in 1D (v[1] == -1), an edge in 2D.
struct BoundaryFacet {
  std::array<int, 2> v{-1, -1};
  int marker = 0;
};

/// Conforming simplicial mesh in 1D (intervals on the x axis) or 2D
/// (CCW-oriented triangles). Refinement keeps the parent link and a
/// child-to-parent element map so nested spaces can be evaluated across
/// levels.
struct SimplicialMesh {
  int dim = 1;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> elements;  ///< 1D: {a, b, -1}
  std::vector<int> refinement_edge;          ///< 2D only; local edge opposite that vertex index
  std::vector<int> generation;
  std::vector<BoundaryFacet> boundary_facets;
  std::vector<BoundaryMarker> markers;

  std::shared_ptr<const SimplicialMesh> parent;
  std::vector<int> parent_element;  ///< per element, index into parent mesh

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int vertices_per_element() const { return dim + 1; }

  double element_measure(int e) const;
  /// Smallest interior angle over all triangles (radians); 2D only.
  double min_angle() const;
  const BoundaryMarker& marker_by_id(int id) const;

  /// Checks element orientation, facet bookkeeping and conformity;
  /// throws std::runtime_error with a description on the first violation.
  void validate() const;
};

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

MeshPtr make_interval_mesh(double a, double b, int n);

/// Marker ids used by the structured factories.
inline constexpr int marker_left = 1;
inline constexpr int marker_right = 2;
inline constexpr int marker_bottom = 3;
inline constexpr int marker_top = 4;
inline constexpr int marker_circle = 5;

MeshPtr make_rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny);

/// Radial-fan triangulation of (-3,9)x(-3,3) minus the unit disk. The hole
/// is an inscribed polygon with circle_segments vertices on x^2+y^2=1,
/// marked with circle projection metadata so refinement snaps new boundary
/// vertices back onto the circle.
MeshPtr make_hemker_mesh(int circle_segments);

/// 1D: halve every element. 2D: red refinement into 4 congruent children.
MeshPtr refine_uniform(const MeshPtr& mesh);

/// Newest vertex bisection of the marked elements plus closure. The result
/// carries parent_element as the child -> ancestor map into *mesh.
MeshPtr refine_adaptive_nvb(const MeshPtr& mesh, const std::vector<int>& marked);

/// Per-element map from `fine` down the parent chain into `coarse`.
/// Identity when both point to the same mesh; throws when `coarse` is not
/// an ancestor of `fine`.
std::vector<int> ancestor_elements(const MeshPtr& fine, const MeshPtr& coarse);

/// Shared edge numbering used by spaces and refinement. Edges are recorded
/// in first-seen element order; edge i of an element is opposite its local
/// vertex i.
struct EdgeTable {
  std::vector<std::array<int, 2>> edge_vertices;
  std::vector<std::array<int, 3>> element_edges;
  std::unordered_map<std::uint64_t, int> index;
  int n_edges() const { return static_cast<int>(edge_vertices.size()); }
};

EdgeTable build_edge_table(const SimplicialMesh& mesh);

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

/// Barycentric coordinates of x in element e (size dim+1).
std::array<double, 3> barycentric(const SimplicialMesh& mesh, int e, Vec2 x);

/// Point location with walking from a hint element. Returns -1 if x lies
/// outside every element (tolerance 1e-12 in barycentric coordinates).
class ElementLocator {
 public:
  explicit ElementLocator(const MeshPtr& mesh);
  int locate(Vec2 x, int hint = -1) const;

 private:
  MeshPtr mesh_;
  std::vector<std::array<int, 3>> neighbors_;  ///< 2D: neighbor across local edge
  std::vector<int> order_;                     ///< 1D: elements sorted by left endpoint
};

}  // namespace lsfem
