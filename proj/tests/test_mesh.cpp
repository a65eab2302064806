#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "lsfem/mesh.hpp"
#include "lsfem/vtk.hpp"

using namespace lsfem;

namespace {

// Exhaustive conformity check, independent of SimplicialMesh::validate():
// every interior edge is shared by exactly two triangles and no vertex sits
// in the interior of another element's edge (no hanging nodes).
void check_conforming_2d(const SimplicialMesh& mesh) {
  REQUIRE(mesh.dim == 2);
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& el : mesh.elements) {
    for (int i = 0; i < 3; ++i) {
      int a = el[i], b = el[(i + 1) % 3];
      if (a > b) std::swap(a, b);
      edge_count[{a, b}] += 1;
    }
  }
  for (const auto& [edge, count] : edge_count) {
    CHECK(count >= 1);
    CHECK(count <= 2);
  }
  // Hanging-node scan: a vertex lying strictly inside some edge would show up
  // as an edge endpoint pair (a,m), (m,b) while (a,b) is still an edge.
  for (const auto& [edge, count] : edge_count) {
    const Vec2 pa = mesh.vertices[edge.first];
    const Vec2 pb = mesh.vertices[edge.second];
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (v == edge.first || v == edge.second) continue;
      const Vec2 p = mesh.vertices[v];
      const Vec2 d = pb - pa;
      const double len2 = dot(d, d);
      const double t = dot(p - pa, d) / len2;
      if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
      const Vec2 foot = pa + t * d;
      CHECK_MESSAGE(norm(p - foot) > 1e-12 * std::sqrt(len2), "hanging vertex ", v);
    }
  }
}

double total_boundary_length(const SimplicialMesh& mesh) {
  double acc = 0.0;
  for (const auto& facet : mesh.boundary_facets)
    acc += norm(mesh.vertices[facet.v[0]] - mesh.vertices[facet.v[1]]);
  return acc;
}

}  // namespace

TEST_CASE("make_interval_mesh basics") {
  auto mesh = make_interval_mesh(0.0, 1.0, 2);
  CHECK(mesh->dim == 1);
  CHECK(mesh->n_vertices() == 3);
  CHECK(mesh->n_elements() == 2);
  CHECK(mesh->element_measure(0) == doctest::Approx(0.5));
  CHECK(mesh->boundary_facets.size() == 2);
  mesh->validate();

  CHECK_THROWS_AS(make_interval_mesh(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_interval_mesh(1.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("make_rect_mesh basics") {
  auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 1, 1);
  CHECK(mesh->dim == 2);
  CHECK(mesh->n_vertices() == 4);
  CHECK(mesh->n_elements() == 2);
  // Both triangles carry half the unit square.
  CHECK(mesh->element_measure(0) == doctest::Approx(0.5));
  CHECK(mesh->element_measure(1) == doctest::Approx(0.5));
  CHECK(mesh->min_angle() == doctest::Approx(M_PI / 4).epsilon(1e-12));
  mesh->validate();

  auto big = make_rect_mesh(-1.0, 2.0, 3.0, 5.0, 4, 3);
  CHECK(big->n_elements() == 2 * 4 * 3);
  CHECK(big->n_vertices() == 5 * 4);
  mesh->validate();
  double area = 0.0;
  for (int e = 0; e < big->n_elements(); ++e) area += big->element_measure(e);
  CHECK(area == doctest::Approx(4.0 * 3.0).epsilon(1e-13));
  CHECK(total_boundary_length(*big) == doctest::Approx(2 * (4.0 + 3.0)).epsilon(1e-13));
}

TEST_CASE("refine_uniform halves intervals and quarters triangles") {
  SUBCASE("1D") {
    auto coarse = make_interval_mesh(0.0, 1.0, 2);
    auto fine = refine_uniform(coarse);
    CHECK(fine->n_elements() == 4);
    for (int e = 0; e < 4; ++e) CHECK(fine->element_measure(e) == doctest::Approx(0.25));
    CHECK(fine->parent == coarse);
    REQUIRE(fine->parent_element.size() == 4);

    auto finer = refine_uniform(fine);
    CHECK(finer->n_elements() == 8);
    for (int e = 0; e < 8; ++e) CHECK(finer->element_measure(e) == doctest::Approx(1.0 / 8.0));
  }
  SUBCASE("2D red refinement") {
    auto coarse = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 1, 1);
    auto fine = refine_uniform(coarse);
    CHECK(fine->n_elements() == 8);
    check_conforming_2d(*fine);
    fine->validate();
    // Children are congruent: every measure is a quarter of the parent's.
    for (int e = 0; e < fine->n_elements(); ++e)
      CHECK(fine->element_measure(e) == doctest::Approx(0.125));
    // Boundary stays fully marked.
    CHECK(total_boundary_length(*fine) == doctest::Approx(4.0).epsilon(1e-13));
  }
}

TEST_CASE("refine_adaptive_nvb basic contracts") {
  SUBCASE("marked = {} leaves the mesh content unchanged") {
    auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 2, 2);
    auto same = refine_adaptive_nvb(mesh, {});
    CHECK(same->n_elements() == mesh->n_elements());
    CHECK(same->n_vertices() == mesh->n_vertices());
    for (int e = 0; e < mesh->n_elements(); ++e) {
      CHECK(same->parent_element[e] == e);
      CHECK(same->element_measure(e) == doctest::Approx(mesh->element_measure(e)));
    }
  }
  SUBCASE("1D bisection of the marked element only") {
    auto mesh = make_interval_mesh(0.0, 1.0, 2);
    auto fine = refine_adaptive_nvb(mesh, {1});
    CHECK(fine->n_elements() == 3);
    // Parent map sends both children of element 1 back to it.
    int children_of_1 = 0;
    for (int e = 0; e < fine->n_elements(); ++e)
      if (fine->parent_element[e] == 1) ++children_of_1;
    CHECK(children_of_1 == 2);
  }
  SUBCASE("2-triangle square, marked={0} stays conforming") {
    auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 1, 1);
    auto fine = refine_adaptive_nvb(mesh, {0});
    CHECK(fine->n_elements() >= 3);  // marked element bisected, closure may add more
    check_conforming_2d(*fine);
    fine->validate();
    double area = 0.0;
    for (int e = 0; e < fine->n_elements(); ++e) {
      area += fine->element_measure(e);
      CHECK(fine->element_measure(e) > 0.0);
    }
    CHECK(area == doctest::Approx(1.0).epsilon(1e-13));
    // Every child of the marked element is strictly smaller.
    for (int e = 0; e < fine->n_elements(); ++e)
      if (fine->parent_element[e] == 0) CHECK(fine->element_measure(e) < 0.5 - 1e-12);
  }
  SUBCASE("generation increments by one per bisection") {
    auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 1, 1);
    auto fine = refine_adaptive_nvb(mesh, {0});
    for (int e = 0; e < fine->n_elements(); ++e) {
      if (fine->parent_element[e] == 0) CHECK(fine->generation[e] >= 1);
      CHECK(fine->generation[e] <= 2);  // closure bisects a neighbor at most twice here
    }
  }
}

TEST_CASE("NVB keeps right-isosceles rect meshes right-isosceles") {
  // On lattice meshes every triangle is a scaled/rotated copy of the initial
  // one under newest vertex bisection, so the minimum angle never leaves
  // pi/4. This is the shape-regularity invariant in its sharpest form.
  auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 2, 2);
  const double initial_angle = mesh->min_angle();
  CHECK(initial_angle == doctest::Approx(M_PI / 4).epsilon(1e-12));

  std::mt19937 rng(1234);
  MeshPtr current = mesh;
  for (int round = 0; round < 12; ++round) {
    std::vector<int> marked;
    for (int e = 0; e < current->n_elements(); ++e)
      if (rng() % 3 == 0) marked.push_back(e);
    if (marked.empty()) marked.push_back(static_cast<int>(rng() % current->n_elements()));
    current = refine_adaptive_nvb(current, marked);
    CHECK(current->min_angle() >= initial_angle - 1e-9);
  }
  check_conforming_2d(*current);
  current->validate();
  double area = 0.0;
  for (int e = 0; e < current->n_elements(); ++e) area += current->element_measure(e);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(total_boundary_length(*current) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("ancestor_elements walks the parent chain") {
  auto coarse = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 1, 1);
  auto mid = refine_adaptive_nvb(coarse, {0, 1});
  auto fine = refine_adaptive_nvb(mid, {0});

  SUBCASE("identity on the same mesh") {
    auto ids = ancestor_elements(fine, fine);
    for (int e = 0; e < fine->n_elements(); ++e) CHECK(ids[e] == e);
  }
  SUBCASE("two-level composition lands inside the right coarse triangle") {
    auto ids = ancestor_elements(fine, coarse);
    REQUIRE(static_cast<int>(ids.size()) == fine->n_elements());
    for (int e = 0; e < fine->n_elements(); ++e) {
      // The child's centroid must lie inside its reported ancestor.
      Vec2 c{0.0, 0.0};
      for (int i = 0; i < 3; ++i) c = c + (1.0 / 3.0) * fine->vertices[fine->elements[e][i]];
      auto bc = barycentric(*coarse, ids[e], c);
      for (int i = 0; i < 3; ++i) CHECK(bc[i] >= -1e-12);
    }
  }
  SUBCASE("throws when coarse is not an ancestor") {
    auto stranger = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 2, 2);
    CHECK_THROWS(ancestor_elements(fine, stranger));
  }
}

TEST_CASE("ElementLocator finds points, honours hints, rejects outside points") {
  auto mesh = make_rect_mesh(0.0, 0.0, 2.0, 1.0, 8, 4);
  ElementLocator locator(mesh);

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> ux(0.0, 2.0), uy(0.0, 1.0);
  int hint = -1;
  for (int i = 0; i < 200; ++i) {
    Vec2 p{ux(rng), uy(rng)};
    int e = locator.locate(p, hint);
    REQUIRE(e >= 0);
    auto bc = barycentric(*mesh, e, p);
    for (int k = 0; k < 3; ++k) CHECK(bc[k] >= -1e-12);
    hint = e;
  }
  CHECK(locator.locate({-0.5, 0.5}) == -1);
  CHECK(locator.locate({2.5, 0.5}) == -1);
  CHECK(locator.locate({1.0, 1.5}) == -1);

  SUBCASE("1D locator") {
    auto line = make_interval_mesh(0.0, 1.0, 7);
    ElementLocator loc1(line);
    int h = -1;
    for (int i = 0; i <= 70; ++i) {
      double x = i / 70.0;
      int e = loc1.locate({x, 0.0}, h);
      REQUIRE(e >= 0);
      CHECK(line->vertices[line->elements[e][0]].x <= x + 1e-12);
      CHECK(line->vertices[line->elements[e][1]].x >= x - 1e-12);
      h = e;
    }
    CHECK(loc1.locate({1.2, 0.0}) == -1);
  }
}

TEST_CASE("edge table is consistent with element connectivity") {
  auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 2, 3);
  auto table = build_edge_table(*mesh);
  // Euler: E = V + T - 1 for a simply connected planar triangulation.
  CHECK(table.n_edges() == mesh->n_vertices() + mesh->n_elements() - 1);
  for (int e = 0; e < mesh->n_elements(); ++e) {
    for (int i = 0; i < 3; ++i) {
      const int edge = table.element_edges[e][i];
      const auto ev = table.edge_vertices[edge];
      // Edge i is opposite local vertex i: its endpoints are the other two.
      const auto& el = mesh->elements[e];
      std::set<int> expected{el[(i + 1) % 3], el[(i + 2) % 3]};
      CHECK(expected.count(ev[0]) == 1);
      CHECK(expected.count(ev[1]) == 1);
      CHECK(table.index.at(edge_key(ev[0], ev[1])) == edge);
    }
  }
}

TEST_CASE("hemker mesh geometry") {
  auto mesh = make_hemker_mesh(32);
  mesh->validate();
  CHECK(mesh->dim == 2);

  SUBCASE("all triangles positively oriented") {
    for (int e = 0; e < mesh->n_elements(); ++e) CHECK(mesh->element_measure(e) > 0.0);
  }

  SUBCASE("hole vertices sit on the unit circle within 1e-12") {
    int circle_vertices = 0;
    for (const auto& facet : mesh->boundary_facets) {
      if (facet.marker != marker_circle) continue;
      for (int k = 0; k < 2; ++k) {
        const Vec2 p = mesh->vertices[facet.v[k]];
        CHECK(std::abs(p.x * p.x + p.y * p.y - 1.0) < 1e-12);
        ++circle_vertices;
      }
    }
    CHECK(circle_vertices >= 2 * 32);
  }

  SUBCASE("total area equals rectangle minus inscribed polygon") {
    // The hole is the inscribed regular-ish polygon, not the disk itself.
    double area = 0.0;
    for (int e = 0; e < mesh->n_elements(); ++e) area += mesh->element_measure(e);
    double polygon = 0.0;  // shoelace over the circle facets around the origin
    for (const auto& facet : mesh->boundary_facets) {
      if (facet.marker != marker_circle) continue;
      const Vec2 a = mesh->vertices[facet.v[0]], b = mesh->vertices[facet.v[1]];
      polygon += 0.5 * std::abs(cross2(a, b));
    }
    CHECK(area == doctest::Approx(12.0 * 6.0 - polygon).epsilon(1e-12));
  }

  SUBCASE("boundary markers cover all four slabs plus circle") {
    std::set<int> seen;
    for (const auto& facet : mesh->boundary_facets) seen.insert(facet.marker);
    CHECK(seen == std::set<int>{marker_left, marker_right, marker_bottom, marker_top,
                                marker_circle});
    CHECK(mesh->marker_by_id(marker_circle).projection.has_value());
    CHECK(mesh->marker_by_id(marker_left).kind == BcKind::dirichlet);
    CHECK(mesh->marker_by_id(marker_top).kind == BcKind::neumann);
  }

  SUBCASE("refinement snaps new hole vertices back onto the circle") {
    MeshPtr current = mesh;
    for (int round = 0; round < 3; ++round) {
      // Mark everything near the hole so circle facets certainly split.
      std::vector<int> marked;
      for (int e = 0; e < current->n_elements(); ++e) {
        Vec2 c{0.0, 0.0};
        for (int i = 0; i < 3; ++i) c = c + (1.0 / 3.0) * current->vertices[current->elements[e][i]];
        if (norm(c) < 1.6) marked.push_back(e);
      }
      current = refine_adaptive_nvb(current, marked);
      current->validate();
      int on_circle = 0;
      for (const auto& facet : current->boundary_facets) {
        if (facet.marker != marker_circle) continue;
        for (int k = 0; k < 2; ++k) {
          const Vec2 p = current->vertices[facet.v[k]];
          CHECK(std::abs(p.x * p.x + p.y * p.y - 1.0) < 1e-12);
        }
        ++on_circle;
      }
      CHECK(on_circle > 0);
    }
    // More circle facets than initially: the polygon actually refined.
    int initial = 0, now = 0;
    for (const auto& f : mesh->boundary_facets) initial += f.marker == marker_circle;
    for (const auto& f : current->boundary_facets) now += f.marker == marker_circle;
    CHECK(now > initial);
  }

  SUBCASE("shape regularity survives refinement rounds") {
    const double floor = mesh->min_angle() / 3.0;
    MeshPtr current = mesh;
    std::mt19937 rng(7);
    for (int round = 0; round < 6; ++round) {
      std::vector<int> marked;
      for (int e = 0; e < current->n_elements(); ++e)
        if (rng() % 4 == 0) marked.push_back(e);
      if (marked.empty()) marked.push_back(0);
      current = refine_adaptive_nvb(current, marked);
      CHECK(current->min_angle() > floor);
    }
  }

  CHECK_THROWS_AS(make_hemker_mesh(4), std::invalid_argument);
}

TEST_CASE("vtk export writes a legacy unstructured grid") {
  auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 1, 1);
  const std::string path = "test_mesh_out.vtk";
  write_vtk(mesh, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  CHECK(text.find("# vtk DataFile Version") != std::string::npos);
  CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(text.find("POINTS 4") != std::string::npos);
  CHECK(text.find("CELL_TYPES 2") != std::string::npos);
  std::remove(path.c_str());
}
