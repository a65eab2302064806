#include "lsfem/space.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

namespace lsfem {

int shape_count(int dim, int degree) {
  if (dim == 1) return degree + 1;
  return degree == 1 ? 3 : 6;
}

void shape_values(int dim, int degree, Vec2 ref, double* values) {
  if (dim == 1) {
    const double l0 = 1.0 - ref.x, l1 = ref.x;
    if (degree == 1) {
      values[0] = l0;
      values[1] = l1;
    } else {
      values[0] = l0 * (2.0 * l0 - 1.0);
      values[1] = l1 * (2.0 * l1 - 1.0);
      values[2] = 4.0 * l0 * l1;
    }
    return;
  }
  const double l[3] = {1.0 - ref.x - ref.y, ref.x, ref.y};
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) values[i] = l[i];
    return;
  }
  for (int i = 0; i < 3; ++i) values[i] = l[i] * (2.0 * l[i] - 1.0);
  for (int i = 0; i < 3; ++i) values[3 + i] = 4.0 * l[(i + 1) % 3] * l[(i + 2) % 3];
}

void shape_ref_gradients(int dim, int degree, Vec2 ref, Vec2* grads) {
  if (dim == 1) {
    const double l0 = 1.0 - ref.x, l1 = ref.x;
    if (degree == 1) {
      grads[0] = {-1.0, 0.0};
      grads[1] = {1.0, 0.0};
    } else {
      grads[0] = {-(4.0 * l0 - 1.0), 0.0};
      grads[1] = {4.0 * l1 - 1.0, 0.0};
      grads[2] = {4.0 * (l0 - l1), 0.0};
    }
    return;
  }
  const double l[3] = {1.0 - ref.x - ref.y, ref.x, ref.y};
  const Vec2 dl[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) grads[i] = dl[i];
    return;
  }
  for (int i = 0; i < 3; ++i) grads[i] = (4.0 * l[i] - 1.0) * dl[i];
  for (int i = 0; i < 3; ++i) {
    int a = (i + 1) % 3, b = (i + 2) % 3;
    grads[3 + i] = 4.0 * (l[a] * dl[b] + l[b] * dl[a]);
  }
}

ElementMap element_map(const SimplicialMesh& mesh, int e) {
  const auto& el = mesh.elements[e];
  ElementMap map;
  map.dim = mesh.dim;
  map.v0 = mesh.vertices[el[0]];
  if (mesh.dim == 1) {
    map.j00 = mesh.vertices[el[1]].x - map.v0.x;
    map.det = map.j00;
    return map;
  }
  Vec2 a = mesh.vertices[el[1]] - map.v0;
  Vec2 b = mesh.vertices[el[2]] - map.v0;
  map.j00 = a.x;
  map.j10 = a.y;
  map.j01 = b.x;
  map.j11 = b.y;
  map.det = map.j00 * map.j11 - map.j01 * map.j10;
  return map;
}

SpacePtr build_space(const MeshPtr& mesh, int degree,
                     const std::vector<int>& dirichlet_markers) {
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("build_space: degree must be 1 or 2");

  auto space = std::make_shared<FeSpace>();
  space->mesh = mesh;
  space->degree = degree;
  space->dirichlet_markers = dirichlet_markers;
  space->local_dofs = shape_count(mesh->dim, degree);

  const int nv = mesh->n_vertices();
  space->dof_coords = mesh->vertices;

  if (degree == 2) {
    // Collect the edges (1D: each element is its own edge) and number their
    // dofs in sorted endpoint order behind the vertex block.
    std::set<std::array<int, 2>> edges;
    for (const auto& el : mesh->elements) {
      if (mesh->dim == 1) {
        edges.insert({std::min(el[0], el[1]), std::max(el[0], el[1])});
      } else {
        for (int i = 0; i < 3; ++i) {
          int a = el[(i + 1) % 3], b = el[(i + 2) % 3];
          edges.insert({std::min(a, b), std::max(a, b)});
        }
      }
    }
    int next = nv;
    for (const auto& [a, b] : edges) {
      space->edge_dofs[edge_key(a, b)] = next++;
      space->dof_coords.push_back(0.5 * (mesh->vertices[a] + mesh->vertices[b]));
    }
  }

  space->element_dofs.resize(static_cast<std::size_t>(mesh->n_elements()) * space->local_dofs);
  for (int e = 0; e < mesh->n_elements(); ++e) {
    const auto& el = mesh->elements[e];
    int* dofs = space->element_dofs.data() + static_cast<std::size_t>(e) * space->local_dofs;
    for (int i = 0; i <= mesh->dim; ++i) dofs[i] = el[i];
    if (degree == 2) {
      if (mesh->dim == 1) {
        dofs[2] = space->edge_dofs.at(edge_key(el[0], el[1]));
      } else {
        for (int i = 0; i < 3; ++i)
          dofs[3 + i] = space->edge_dofs.at(edge_key(el[(i + 1) % 3], el[(i + 2) % 3]));
      }
    }
  }

  space->is_dirichlet.assign(space->n_dofs(), 0);
  const std::set<int> constrained(dirichlet_markers.begin(), dirichlet_markers.end());
  for (const auto& facet : mesh->boundary_facets) {
    if (!constrained.count(facet.marker)) continue;
    space->is_dirichlet[facet.v[0]] = 1;
    if (mesh->dim == 2) {
      space->is_dirichlet[facet.v[1]] = 1;
      if (degree == 2)
        space->is_dirichlet[space->edge_dofs.at(edge_key(facet.v[0], facet.v[1]))] = 1;
    }
  }

  space->free_index.assign(space->n_dofs(), -1);
  for (int d = 0; d < space->n_dofs(); ++d) {
    if (space->is_dirichlet[d]) continue;
    space->free_index[d] = space->n_free();
    space->free_dofs.push_back(d);
  }

  space->point_locator = std::make_shared<ElementLocator>(mesh);
  return space;
}

FeFunction zero_function(const SpacePtr& space) {
  return {space, std::vector<double>(space->n_dofs(), 0.0)};
}

namespace {

double evaluate_in_element(const FeFunction& f, int e, Vec2 point) {
  const FeSpace& space = *f.space;
  auto bc = barycentric(*space.mesh, e, point);
  double values[6];
  shape_values(space.mesh->dim, space.degree, ref_from_barycentric(space.mesh->dim, bc), values);
  const int* dofs = space.dofs_of(e);
  double result = 0.0;
  for (int i = 0; i < space.local_dofs; ++i) result += f.coefficients[dofs[i]] * values[i];
  return result;
}

}  // namespace

double evaluate(const FeFunction& f, Vec2 point, int& hint) {
  assert(f.coefficients.size() == static_cast<std::size_t>(f.space->n_dofs()));
  int e = f.space->point_locator->locate(point, hint);
  if (e < 0)
    throw std::runtime_error("evaluate: point (" + std::to_string(point.x) + ", " +
                             std::to_string(point.y) + ") lies outside the mesh");
  hint = e;
  return evaluate_in_element(f, e, point);
}

double evaluate(const FeFunction& f, Vec2 point) {
  int hint = -1;
  return evaluate(f, point, hint);
}

FeFunction interpolate(const SpacePtr& space, const std::function<double(Vec2)>& g) {
  FeFunction f{space, std::vector<double>(space->n_dofs())};
  for (int d = 0; d < space->n_dofs(); ++d) f.coefficients[d] = g(space->dof_coords[d]);
  return f;
}

FeFunction prolongate(const FeFunction& coarse, const SpacePtr& fine) {
  int hint = -1;
  FeFunction f{fine, std::vector<double>(fine->n_dofs())};
  for (int d = 0; d < fine->n_dofs(); ++d)
    f.coefficients[d] = evaluate(coarse, fine->dof_coords[d], hint);
  return f;
}

}  // namespace lsfem
