#include "lsfem/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace lsfem {

double SimplicialMesh::element_measure(int e) const {
  const auto& el = elements[e];
  if (dim == 1) return vertices[el[1]].x - vertices[el[0]].x;
  return 0.5 * cross2(vertices[el[1]] - vertices[el[0]], vertices[el[2]] - vertices[el[0]]);
}

double SimplicialMesh::min_angle() const {
  if (dim != 2) throw std::runtime_error("min_angle: 2D meshes only");
  double best = M_PI;
  for (int e = 0; e < n_elements(); ++e) {
    const auto& el = elements[e];
    for (int i = 0; i < 3; ++i) {
      Vec2 a = vertices[el[(i + 1) % 3]] - vertices[el[i]];
      Vec2 b = vertices[el[(i + 2) % 3]] - vertices[el[i]];
      double ang = std::acos(dot(a, b) / (norm(a) * norm(b)));
      best = std::min(best, ang);
    }
  }
  return best;
}

const BoundaryMarker& SimplicialMesh::marker_by_id(int id) const {
  for (const auto& m : markers)
    if (m.id == id) return m;
  throw std::runtime_error("unknown boundary marker id " + std::to_string(id));
}

void SimplicialMesh::validate() const {
  for (int e = 0; e < n_elements(); ++e) {
    if (element_measure(e) <= 0.0)
      throw std::runtime_error("element " + std::to_string(e) + " has nonpositive measure");
  }
  std::set<int> marker_ids;
  for (const auto& m : markers) {
    if (!marker_ids.insert(m.id).second) throw std::runtime_error("duplicate boundary marker id");
    if (m.projection && m.projection->radius <= 0.0)
      throw std::runtime_error("circle projection with nonpositive radius");
  }
  if (dim == 1) {
    // Facets are the endpoints: each must belong to exactly one element.
    std::map<int, int> vertex_use;
    for (const auto& el : elements) {
      vertex_use[el[0]]++;
      vertex_use[el[1]]++;
    }
    std::set<int> facet_vertices;
    for (const auto& f : boundary_facets) {
      if (!facet_vertices.insert(f.v[0]).second)
        throw std::runtime_error("boundary vertex listed twice");
      if (vertex_use[f.v[0]] != 1) throw std::runtime_error("boundary vertex is interior");
    }
    for (const auto& [v, cnt] : vertex_use) {
      if (cnt == 1 && !facet_vertices.count(v))
        throw std::runtime_error("endpoint vertex missing from boundary_facets");
      if (cnt > 2) throw std::runtime_error("vertex shared by more than two intervals");
    }
    return;
  }
  // 2D conformity: every edge appears in at most two elements, and the
  // boundary facets are exactly the single-use edges, each listed once.
  std::map<std::uint64_t, int> edge_use;
  for (const auto& el : elements)
    for (int i = 0; i < 3; ++i) edge_use[edge_key(el[(i + 1) % 3], el[(i + 2) % 3])]++;
  std::set<std::uint64_t> facet_edges;
  for (const auto& f : boundary_facets) {
    auto key = edge_key(f.v[0], f.v[1]);
    if (!facet_edges.insert(key).second) throw std::runtime_error("boundary facet listed twice");
    auto it = edge_use.find(key);
    if (it == edge_use.end() || it->second != 1)
      throw std::runtime_error("boundary facet is not a single-use element edge");
    marker_by_id(f.marker);
  }
  for (const auto& [key, cnt] : edge_use) {
    if (cnt > 2) throw std::runtime_error("edge shared by more than two elements");
    if (cnt == 1 && !facet_edges.count(key))
      throw std::runtime_error("hanging or unmarked boundary edge");
  }
  for (int e = 0; e < n_elements(); ++e) {
    if (refinement_edge[e] < 0 || refinement_edge[e] > 2)
      throw std::runtime_error("invalid refinement edge index");
  }
}

EdgeTable build_edge_table(const SimplicialMesh& mesh) {
  EdgeTable table;
  table.element_edges.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int i = 0; i < 3; ++i) {
      int a = el[(i + 1) % 3], b = el[(i + 2) % 3];
      auto key = edge_key(a, b);
      auto [it, inserted] = table.index.try_emplace(key, table.n_edges());
      if (inserted) table.edge_vertices.push_back({std::min(a, b), std::max(a, b)});
      table.element_edges[e][i] = it->second;
    }
  }
  return table;
}

std::array<double, 3> barycentric(const SimplicialMesh& mesh, int e, Vec2 x) {
  const auto& el = mesh.elements[e];
  if (mesh.dim == 1) {
    double x0 = mesh.vertices[el[0]].x, x1 = mesh.vertices[el[1]].x;
    double t = (x.x - x0) / (x1 - x0);
    return {1.0 - t, t, 0.0};
  }
  Vec2 v0 = mesh.vertices[el[0]], v1 = mesh.vertices[el[1]], v2 = mesh.vertices[el[2]];
  double area = cross2(v1 - v0, v2 - v0);
  double l1 = cross2(x - v0, v2 - v0) / area;
  double l2 = cross2(v1 - v0, x - v0) / area;
  return {1.0 - l1 - l2, l1, l2};
}

namespace {

// Initial refinement edge: the longest edge, ties by lowest sorted vertex
// pair. Children produced by bisection get their refinement edge assigned
// explicitly, so this runs only for freshly built meshes.
void assign_longest_refinement_edges(SimplicialMesh& mesh) {
  mesh.refinement_edge.assign(mesh.n_elements(), 0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[e];
    int best = 0;
    double best_len = -1.0;
    std::pair<int, int> best_pair{0, 0};
    for (int i = 0; i < 3; ++i) {
      int a = el[(i + 1) % 3], b = el[(i + 2) % 3];
      double len = norm(mesh.vertices[a] - mesh.vertices[b]);
      std::pair<int, int> pair{std::min(a, b), std::max(a, b)};
      if (len > best_len + 1e-14 * (1.0 + len) ||
          (std::abs(len - best_len) <= 1e-14 * (1.0 + len) && pair < best_pair)) {
        best = i;
        best_len = len;
        best_pair = pair;
      }
    }
    mesh.refinement_edge[e] = best;
  }
}

Vec2 project_to_circle(Vec2 p, const CircleProjection& c) {
  Vec2 d = p - c.center;
  double r = norm(d);
  return c.center + (c.radius / r) * d;
}

// Midpoint of boundary edge (a,b), projected onto the circle when the facet
// carries projection metadata.
Vec2 facet_aware_midpoint(const SimplicialMesh& mesh,
                          const std::map<std::uint64_t, int>& facet_of_edge, int a, int b) {
  Vec2 m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
  auto it = facet_of_edge.find(edge_key(a, b));
  if (it != facet_of_edge.end()) {
    const auto& marker = mesh.marker_by_id(mesh.boundary_facets[it->second].marker);
    if (marker.projection) m = project_to_circle(m, *marker.projection);
  }
  return m;
}

std::map<std::uint64_t, int> facet_lookup(const SimplicialMesh& mesh) {
  std::map<std::uint64_t, int> lookup;
  for (int f = 0; f < static_cast<int>(mesh.boundary_facets.size()); ++f) {
    const auto& bf = mesh.boundary_facets[f];
    lookup[edge_key(bf.v[0], bf.v[1])] = f;
  }
  return lookup;
}

}  // namespace

MeshPtr make_interval_mesh(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("make_interval_mesh: need n >= 1");
  if (!(a < b)) throw std::invalid_argument("make_interval_mesh: need a < b");
  auto mesh = std::make_shared<SimplicialMesh>();
  mesh->dim = 1;
  mesh->vertices.resize(n + 1);
  for (int i = 0; i <= n; ++i) mesh->vertices[i] = {a + (b - a) * i / n, 0.0};
  mesh->elements.resize(n);
  for (int e = 0; e < n; ++e) mesh->elements[e] = {e, e + 1, -1};
  mesh->generation.assign(n, 0);
  mesh->boundary_facets = {{{0, -1}, marker_left}, {{n, -1}, marker_right}};
  mesh->markers = {{marker_left, BcKind::dirichlet, {}}, {marker_right, BcKind::dirichlet, {}}};
  return mesh;
}

MeshPtr make_rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny) {
  if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("make_rect_mesh: degenerate rectangle");
  if (nx < 1 || ny < 1) throw std::invalid_argument("make_rect_mesh: need nx, ny >= 1");
  auto mesh = std::make_shared<SimplicialMesh>();
  mesh->dim = 2;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh->vertices.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // Diagonal from the lower-left to the upper-right corner of each cell.
      mesh->elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh->elements.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  mesh->generation.assign(mesh->n_elements(), 0);
  for (int j = 0; j < ny; ++j) {
    mesh->boundary_facets.push_back({{vid(0, j + 1), vid(0, j)}, marker_left});
    mesh->boundary_facets.push_back({{vid(nx, j), vid(nx, j + 1)}, marker_right});
  }
  for (int i = 0; i < nx; ++i) {
    mesh->boundary_facets.push_back({{vid(i, 0), vid(i + 1, 0)}, marker_bottom});
    mesh->boundary_facets.push_back({{vid(i + 1, ny), vid(i, ny)}, marker_top});
  }
  mesh->markers = {{marker_left, BcKind::dirichlet, {}},
                   {marker_right, BcKind::dirichlet, {}},
                   {marker_bottom, BcKind::dirichlet, {}},
                   {marker_top, BcKind::dirichlet, {}}};
  assign_longest_refinement_edges(*mesh);
  return mesh;
}

MeshPtr make_hemker_mesh(int circle_segments) {
  if (circle_segments < 8) throw std::invalid_argument("make_hemker_mesh: need >= 8 segments");
  const double xmin = -3.0, xmax = 9.0, ymin = -3.0, ymax = 3.0;

  // Rays from the origin: uniform circle angles plus the exact corner
  // directions, so every rectangle corner is a ray endpoint.
  std::set<double> angle_set;
  for (int k = 0; k < circle_segments; ++k) angle_set.insert(2.0 * M_PI * k / circle_segments);
  for (Vec2 corner : {Vec2{xmax, ymax}, Vec2{xmin, ymax}, Vec2{xmin, ymin}, Vec2{xmax, ymin}}) {
    double a = std::atan2(corner.y, corner.x);
    if (a < 0) a += 2.0 * M_PI;
    angle_set.insert(a);
  }
  // Drop near-duplicates from the corner insertion.
  std::vector<double> angles;
  for (double a : angle_set) {
    if (!angles.empty() && a - angles.back() < 1e-9) continue;
    angles.push_back(a);
  }
  if (angles.size() > 1 && 2.0 * M_PI - angles.back() + angles.front() < 1e-9) angles.pop_back();
  const int ns = static_cast<int>(angles.size());

  // Distance from the origin to the rectangle boundary along each ray.
  auto ray_exit = [&](double a) {
    Vec2 d{std::cos(a), std::sin(a)};
    double t = 1e300;
    if (d.x > 1e-14) t = std::min(t, xmax / d.x);
    if (d.x < -1e-14) t = std::min(t, xmin / d.x);
    if (d.y > 1e-14) t = std::min(t, ymax / d.y);
    if (d.y < -1e-14) t = std::min(t, ymin / d.y);
    return t;
  };

  // Radial layers: geometric grading from the circle outward.
  const int layers = std::max(3, circle_segments / 8);
  const double grow = 2.5;
  std::vector<double> frac(layers + 1);
  for (int j = 0; j <= layers; ++j)
    frac[j] = (std::pow(grow, j) - 1.0) / (std::pow(grow, layers) - 1.0);

  auto mesh = std::make_shared<SimplicialMesh>();
  mesh->dim = 2;
  auto vid = [&](int k, int j) { return k * (layers + 1) + j; };
  for (int k = 0; k < ns; ++k) {
    double a = angles[k];
    Vec2 dir{std::cos(a), std::sin(a)};
    Vec2 inner = dir;
    Vec2 outer = ray_exit(a) * dir;
    for (int j = 0; j <= layers; ++j)
      mesh->vertices.push_back((1.0 - frac[j]) * inner + frac[j] * outer);
  }
  for (int k = 0; k < ns; ++k) {
    int kn = (k + 1) % ns;
    for (int j = 0; j < layers; ++j) {
      // The (angle, radius) grid maps orientation-reversing into the plane,
      // so wind opposite to the lattice order to keep measures positive.
      mesh->elements.push_back({vid(k, j), vid(kn, j + 1), vid(kn, j)});
      mesh->elements.push_back({vid(k, j), vid(k, j + 1), vid(kn, j + 1)});
    }
  }
  mesh->generation.assign(mesh->n_elements(), 0);

  for (int k = 0; k < ns; ++k) {
    int kn = (k + 1) % ns;
    // Hole boundary, oriented with the domain on the left.
    mesh->boundary_facets.push_back({{vid(kn, 0), vid(k, 0)}, marker_circle});
    Vec2 mid = 0.5 * (mesh->vertices[vid(k, layers)] + mesh->vertices[vid(kn, layers)]);
    int marker = marker_right;
    if (std::abs(mid.x - xmin) < 1e-9) marker = marker_left;
    else if (std::abs(mid.y - ymin) < 1e-9) marker = marker_bottom;
    else if (std::abs(mid.y - ymax) < 1e-9) marker = marker_top;
    mesh->boundary_facets.push_back({{vid(k, layers), vid(kn, layers)}, marker});
  }
  mesh->markers = {{marker_left, BcKind::dirichlet, {}},
                   {marker_right, BcKind::neumann, {}},
                   {marker_bottom, BcKind::neumann, {}},
                   {marker_top, BcKind::neumann, {}},
                   {marker_circle, BcKind::dirichlet, CircleProjection{{0.0, 0.0}, 1.0}}};
  assign_longest_refinement_edges(*mesh);
  mesh->validate();
  return mesh;
}

MeshPtr refine_uniform(const MeshPtr& mesh) {
  auto fine = std::make_shared<SimplicialMesh>();
  fine->dim = mesh->dim;
  fine->markers = mesh->markers;
  fine->parent = mesh;
  fine->vertices = mesh->vertices;

  if (mesh->dim == 1) {
    for (int e = 0; e < mesh->n_elements(); ++e) {
      const auto& el = mesh->elements[e];
      int m = fine->n_vertices();
      fine->vertices.push_back(0.5 * (mesh->vertices[el[0]] + mesh->vertices[el[1]]));
      fine->elements.push_back({el[0], m, -1});
      fine->elements.push_back({m, el[1], -1});
      fine->generation.push_back(mesh->generation[e] + 1);
      fine->generation.push_back(mesh->generation[e] + 1);
      fine->parent_element.push_back(e);
      fine->parent_element.push_back(e);
    }
    fine->boundary_facets = mesh->boundary_facets;
    return fine;
  }

  const EdgeTable table = build_edge_table(*mesh);
  const auto facets = facet_lookup(*mesh);
  std::vector<int> midpoint(table.n_edges());
  for (int k = 0; k < table.n_edges(); ++k) {
    auto [a, b] = table.edge_vertices[k];
    midpoint[k] = fine->n_vertices();
    fine->vertices.push_back(facet_aware_midpoint(*mesh, facets, a, b));
  }
  for (int e = 0; e < mesh->n_elements(); ++e) {
    const auto& el = mesh->elements[e];
    const auto& ed = table.element_edges[e];
    int m0 = midpoint[ed[0]], m1 = midpoint[ed[1]], m2 = midpoint[ed[2]];
    const std::array<std::array<int, 3>, 4> children = {{
        {el[0], m2, m1}, {m2, el[1], m0}, {m1, m0, el[2]}, {m0, m1, m2}}};
    for (const auto& c : children) {
      fine->elements.push_back(c);
      fine->generation.push_back(mesh->generation[e] + 1);
      fine->parent_element.push_back(e);
    }
  }
  assign_longest_refinement_edges(*fine);
  for (const auto& f : mesh->boundary_facets) {
    int m = midpoint[table.index.at(edge_key(f.v[0], f.v[1]))];
    fine->boundary_facets.push_back({{f.v[0], m}, f.marker});
    fine->boundary_facets.push_back({{m, f.v[1]}, f.marker});
  }
  return fine;
}

MeshPtr refine_adaptive_nvb(const MeshPtr& mesh, const std::vector<int>& marked) {
  for (int e : marked)
    if (e < 0 || e >= mesh->n_elements())
      throw std::invalid_argument("refine_adaptive_nvb: marked index out of range");

  auto fine = std::make_shared<SimplicialMesh>();
  fine->dim = mesh->dim;
  fine->markers = mesh->markers;
  fine->parent = mesh;
  fine->vertices = mesh->vertices;

  if (mesh->dim == 1) {
    std::vector<char> split(mesh->n_elements(), 0);
    for (int e : marked) split[e] = 1;
    for (int e = 0; e < mesh->n_elements(); ++e) {
      const auto& el = mesh->elements[e];
      if (!split[e]) {
        fine->elements.push_back(el);
        fine->generation.push_back(mesh->generation[e]);
        fine->parent_element.push_back(e);
        continue;
      }
      int m = fine->n_vertices();
      fine->vertices.push_back(0.5 * (mesh->vertices[el[0]] + mesh->vertices[el[1]]));
      fine->elements.push_back({el[0], m, -1});
      fine->elements.push_back({m, el[1], -1});
      fine->generation.push_back(mesh->generation[e] + 1);
      fine->generation.push_back(mesh->generation[e] + 1);
      fine->parent_element.push_back(e);
      fine->parent_element.push_back(e);
    }
    fine->boundary_facets = mesh->boundary_facets;
    return fine;
  }

  const EdgeTable table = build_edge_table(*mesh);
  const auto facets = facet_lookup(*mesh);
  std::vector<char> edge_marked(table.n_edges(), 0);
  for (int e : marked) edge_marked[table.element_edges[e][mesh->refinement_edge[e]]] = 1;

  // Closure: whenever any edge of an element is marked, its refinement edge
  // must be marked too. Marks only grow, so this reaches a fixpoint.
  for (bool changed = true; changed;) {
    changed = false;
    for (int e = 0; e < mesh->n_elements(); ++e) {
      const auto& ed = table.element_edges[e];
      int re = ed[mesh->refinement_edge[e]];
      if (edge_marked[re]) continue;
      if (edge_marked[ed[0]] || edge_marked[ed[1]] || edge_marked[ed[2]]) {
        edge_marked[re] = 1;
        changed = true;
      }
    }
  }

  std::vector<int> midpoint(table.n_edges(), -1);
  for (int k = 0; k < table.n_edges(); ++k) {
    if (!edge_marked[k]) continue;
    auto [a, b] = table.edge_vertices[k];
    midpoint[k] = fine->n_vertices();
    fine->vertices.push_back(facet_aware_midpoint(*mesh, facets, a, b));
  }

  auto emit = [&](std::array<int, 3> el, int gen, int parent) {
    fine->elements.push_back(el);
    fine->refinement_edge.push_back(2);
    fine->generation.push_back(gen);
    fine->parent_element.push_back(parent);
  };

  for (int e = 0; e < mesh->n_elements(); ++e) {
    const auto& el = mesh->elements[e];
    const auto& ed = table.element_edges[e];
    const int r = mesh->refinement_edge[e];
    const int gen = mesh->generation[e];
    if (!edge_marked[ed[r]]) {
      assert(!edge_marked[ed[0]] && !edge_marked[ed[1]] && !edge_marked[ed[2]]);
      fine->elements.push_back(el);
      fine->refinement_edge.push_back(r);
      fine->generation.push_back(gen);
      fine->parent_element.push_back(e);
      continue;
    }
    // Bisect the refinement edge (a,b) opposite vertex c; each half is
    // bisected again when its own refinement edge (an old edge) is marked.
    const int c = el[r], a = el[(r + 1) % 3], b = el[(r + 2) % 3];
    const int m = midpoint[ed[r]];
    const int e_ca = ed[(r + 2) % 3], e_bc = ed[(r + 1) % 3];
    if (edge_marked[e_ca]) {
      emit({m, c, midpoint[e_ca]}, gen + 2, e);
      emit({a, m, midpoint[e_ca]}, gen + 2, e);
    } else {
      emit({c, a, m}, gen + 1, e);
    }
    if (edge_marked[e_bc]) {
      emit({m, b, midpoint[e_bc]}, gen + 2, e);
      emit({c, m, midpoint[e_bc]}, gen + 2, e);
    } else {
      emit({b, c, m}, gen + 1, e);
    }
  }

  for (const auto& f : mesh->boundary_facets) {
    int k = table.index.at(edge_key(f.v[0], f.v[1]));
    if (edge_marked[k]) {
      fine->boundary_facets.push_back({{f.v[0], midpoint[k]}, f.marker});
      fine->boundary_facets.push_back({{midpoint[k], f.v[1]}, f.marker});
    } else {
      fine->boundary_facets.push_back(f);
    }
  }
  return fine;
}

std::vector<int> ancestor_elements(const MeshPtr& fine, const MeshPtr& coarse) {
  std::vector<int> map(fine->n_elements());
  for (int e = 0; e < fine->n_elements(); ++e) map[e] = e;
  const SimplicialMesh* level = fine.get();
  while (level != coarse.get()) {
    if (!level->parent) throw std::runtime_error("meshes are not nested");
    for (auto& e : map) e = level->parent_element[e];
    level = level->parent.get();
  }
  return map;
}

ElementLocator::ElementLocator(const MeshPtr& mesh) : mesh_(mesh) {
  if (mesh_->dim == 1) {
    order_.resize(mesh_->n_elements());
    for (int e = 0; e < mesh_->n_elements(); ++e) order_[e] = e;
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      return mesh_->vertices[mesh_->elements[a][0]].x < mesh_->vertices[mesh_->elements[b][0]].x;
    });
    return;
  }
  const EdgeTable table = build_edge_table(*mesh_);
  std::vector<std::array<int, 2>> edge_elems(table.n_edges(), {-1, -1});
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    for (int i = 0; i < 3; ++i) {
      auto& slot = edge_elems[table.element_edges[e][i]];
      (slot[0] < 0 ? slot[0] : slot[1]) = e;
    }
  }
  neighbors_.assign(mesh_->n_elements(), {-1, -1, -1});
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    for (int i = 0; i < 3; ++i) {
      auto slot = edge_elems[table.element_edges[e][i]];
      neighbors_[e][i] = (slot[0] == e) ? slot[1] : slot[0];
    }
  }
}

int ElementLocator::locate(Vec2 x, int hint) const {
  constexpr double tol = 1e-12;
  if (mesh_->dim == 1) {
    // Binary search over elements sorted by left endpoint.
    auto leftmost = [&](int idx) { return mesh_->vertices[mesh_->elements[order_[idx]][0]].x; };
    int lo = 0, hi = static_cast<int>(order_.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      if (leftmost(mid) <= x.x) lo = mid;
      else hi = mid - 1;
    }
    for (int idx : {lo, lo - 1, lo + 1}) {
      if (idx < 0 || idx >= static_cast<int>(order_.size())) continue;
      int e = order_[idx];
      auto bc = barycentric(*mesh_, e, x);
      if (bc[0] >= -tol && bc[1] >= -tol) return e;
    }
    return -1;
  }
  int e = (hint >= 0 && hint < mesh_->n_elements()) ? hint : 0;
  for (int step = 0; step <= mesh_->n_elements(); ++step) {
    auto bc = barycentric(*mesh_, e, x);
    int worst = 0;
    for (int i = 1; i < 3; ++i)
      if (bc[i] < bc[worst]) worst = i;
    if (bc[worst] >= -tol) return e;
    int next = neighbors_[e][worst];
    if (next < 0) break;  // left the mesh through a boundary edge
    e = next;
  }
  for (int cand = 0; cand < mesh_->n_elements(); ++cand) {
    auto bc = barycentric(*mesh_, cand, x);
    if (bc[0] >= -tol && bc[1] >= -tol && bc[2] >= -tol) return cand;
  }
  return -1;
}

}  // namespace lsfem
