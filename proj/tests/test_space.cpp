#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "lsfem/space.hpp"

using namespace lsfem;

TEST_CASE("build_space dof counts and constraints") {
  SUBCASE("interval N=2, P1, both ends dirichlet: 3 dofs, 2 constrained") {
    auto mesh = make_interval_mesh(0.0, 1.0, 2);
    auto space = build_space(mesh, 1, {marker_left, marker_right});
    CHECK(space->n_dofs() == 3);
    CHECK(space->n_free() == 1);
    CHECK(space->is_dirichlet[0] == 1);
    CHECK(space->is_dirichlet[2] == 1);
    CHECK(space->is_dirichlet[1] == 0);
    CHECK(space->free_dofs == std::vector<int>{1});
    CHECK(space->free_index[1] == 0);
  }
  SUBCASE("interval N=2, P2: 5 dofs (vertices + midpoints)") {
    auto mesh = make_interval_mesh(0.0, 1.0, 2);
    auto space = build_space(mesh, 2, {marker_left, marker_right});
    CHECK(space->n_dofs() == 5);
    CHECK(space->n_free() == 3);
    CHECK(space->local_dofs == 3);
  }
  SUBCASE("2-triangle square, P1, all boundary dirichlet: no free dofs") {
    auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 1, 1);
    auto space = build_space(mesh, 1, {marker_left, marker_right, marker_bottom, marker_top});
    CHECK(space->n_dofs() == 4);
    CHECK(space->n_free() == 0);
  }
  SUBCASE("P1 dof count = vertices, P2 = vertices + edges") {
    auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 3, 2);
    auto p1 = build_space(mesh, 1, {});
    CHECK(p1->n_dofs() == mesh->n_vertices());
    auto table = build_edge_table(*mesh);
    auto p2 = build_space(mesh, 2, {});
    CHECK(p2->n_dofs() == mesh->n_vertices() + table.n_edges());
    CHECK(p2->local_dofs == 6);
  }
  SUBCASE("unsupported degree throws") {
    auto mesh = make_interval_mesh(0.0, 1.0, 2);
    CHECK_THROWS(build_space(mesh, 3, {}));
    CHECK_THROWS(build_space(mesh, 0, {}));
  }
  SUBCASE("dof numbering is deterministic across rebuilds") {
    auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 2, 2);
    auto a = build_space(mesh, 2, {marker_left});
    auto b = build_space(mesh, 2, {marker_left});
    REQUIRE(a->n_dofs() == b->n_dofs());
    for (int d = 0; d < a->n_dofs(); ++d) {
      CHECK(a->dof_coords[d].x == b->dof_coords[d].x);
      CHECK(a->dof_coords[d].y == b->dof_coords[d].y);
    }
    CHECK(a->element_dofs == b->element_dofs);
    CHECK(a->free_dofs == b->free_dofs);
  }
}

TEST_CASE("evaluate hits nodal values and reproduces linears") {
  auto mesh = make_interval_mesh(0.0, 1.0, 2);
  auto space = build_space(mesh, 1, {});

  SUBCASE("hat function: 1 at its node, 0 at the neighbours") {
    FeFunction hat = zero_function(space);
    hat.coefficients[1] = 1.0;  // vertex at x = 0.5
    CHECK(evaluate(hat, {0.5, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(hat, {0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(evaluate(hat, {1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(evaluate(hat, {0.25, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("interpolated identity evaluates to the coordinate") {
    FeFunction lin = interpolate(space, [](Vec2 p) { return p.x; });
    CHECK(std::abs(evaluate(lin, {0.3, 0.0}) - 0.3) < 1e-14);
    CHECK(std::abs(evaluate(lin, {0.77, 0.0}) - 0.77) < 1e-14);
  }
  SUBCASE("outside points throw") {
    FeFunction f = zero_function(space);
    CHECK_THROWS_AS(evaluate(f, {1.5, 0.0}), std::runtime_error);
    CHECK_THROWS_AS(evaluate(f, {-0.1, 0.0}), std::runtime_error);
  }
}

TEST_CASE("interpolate fills coefficients from dof coordinates") {
  auto mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 2, 2);
  auto space = build_space(mesh, 2, {});

  SUBCASE("zero field gives the zero vector") {
    FeFunction z = interpolate(space, [](Vec2) { return 0.0; });
    for (double c : z.coefficients) CHECK(c == 0.0);
  }
  SUBCASE("coordinate field") {
    FeFunction fx = interpolate(space, [](Vec2 p) { return p.x; });
    for (int d = 0; d < space->n_dofs(); ++d)
      CHECK(fx.coefficients[d] == doctest::Approx(space->dof_coords[d].x));
  }
  SUBCASE("smooth 1D reference value at x = 0.5") {
    // u(x) = x - (e^{x-1} - e^{-1}) / (1 - e^{-1}) evaluated through a fine
    // interpolant; the nodal value itself is exact.
    auto line = make_interval_mesh(0.0, 1.0, 4);
    auto s1 = build_space(line, 1, {});
    auto u = interpolate(s1, [](Vec2 p) {
      return p.x - (std::exp(p.x - 1.0) - std::exp(-1.0)) / (1.0 - std::exp(-1.0));
    });
    CHECK(std::abs(evaluate(u, {0.5, 0.0}) - 0.122459) < 1e-6);
    CHECK(std::abs(evaluate(u, {0.5, 0.0}) - 0.12245933) < 1e-7);
  }
}

TEST_CASE("partition of unity at random points, both degrees") {
  auto check_pou = [](const SpacePtr& space, Vec2 lo, Vec2 hi, bool planar) {
    std::mt19937 rng(4321);
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
    FeFunction ones = interpolate(space, [](Vec2) { return 1.0; });
    for (int i = 0; i < 100; ++i) {
      Vec2 p{ux(rng), planar ? uy(rng) : 0.0};
      CHECK(std::abs(evaluate(ones, p) - 1.0) < 1e-13);
    }
  };
  check_pou(build_space(make_interval_mesh(0.0, 1.0, 5), 1, {}), {0, 0}, {1, 0}, false);
  check_pou(build_space(make_interval_mesh(0.0, 1.0, 5), 2, {}), {0, 0}, {1, 0}, false);
  check_pou(build_space(make_rect_mesh(0.0, 0.0, 1.0, 1.0, 3, 3), 1, {}), {0, 0}, {1, 1}, true);
  check_pou(build_space(make_rect_mesh(0.0, 0.0, 1.0, 1.0, 3, 3), 2, {}), {0, 0}, {1, 1}, true);

  SUBCASE("shape functions sum to one on the reference element directly") {
    for (int dim = 1; dim <= 2; ++dim) {
      for (int degree = 1; degree <= 2; ++degree) {
        const int n = shape_count(dim, degree);
        std::vector<double> vals(n);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
          double a = u(rng), b = u(rng);
          if (dim == 2 && a + b > 1.0) { a = 1.0 - a; b = 1.0 - b; }
          shape_values(dim, degree, {a, dim == 2 ? b : 0.0}, vals.data());
          double sum = 0.0;
          for (double v : vals) sum += v;
          CHECK(std::abs(sum - 1.0) < 1e-14);
        }
      }
    }
  }
}

TEST_CASE("P2 reproduces quadratics exactly") {
  std::mt19937 rng(2025);
  SUBCASE("1D: x^2") {
    auto space = build_space(make_interval_mesh(0.0, 1.0, 3), 2, {});
    FeFunction q = interpolate(space, [](Vec2 p) { return p.x * p.x; });
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double x = u(rng);
      CHECK(std::abs(evaluate(q, {x, 0.0}) - x * x) < 1e-12);
    }
  }
  SUBCASE("2D: full quadratic polynomial") {
    auto space = build_space(make_rect_mesh(0.0, 0.0, 1.0, 1.0, 2, 2), 2, {});
    auto poly = [](Vec2 p) {
      return 1.0 + 2.0 * p.x - 0.5 * p.y + 3.0 * p.x * p.x - p.x * p.y + 0.25 * p.y * p.y;
    };
    FeFunction q = interpolate(space, poly);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      Vec2 p{u(rng), u(rng)};
      CHECK(std::abs(evaluate(q, p) - poly(p)) < 1e-12);
    }
  }
}

TEST_CASE("prolongation is exact on nested meshes") {
  SUBCASE("1D uniform refinement") {
    auto coarse_mesh = make_interval_mesh(0.0, 1.0, 4);
    auto fine_mesh = refine_uniform(coarse_mesh);
    auto coarse = build_space(coarse_mesh, 1, {});
    auto fine = build_space(fine_mesh, 1, {});
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FeFunction f{coarse, {}};
    f.coefficients.resize(coarse->n_dofs());
    for (double& c : f.coefficients) c = u(rng);
    FeFunction lifted = prolongate(f, fine);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const Vec2 p{ux(rng), 0.0};
      CHECK(std::abs(evaluate(lifted, p) - evaluate(f, p)) < 1e-13);
    }
  }
  SUBCASE("2D NVB refinement, P1 into P1") {
    auto coarse_mesh = make_rect_mesh(0.0, 0.0, 1.0, 1.0, 2, 2);
    auto fine_mesh = refine_adaptive_nvb(coarse_mesh, {0, 3, 5});
    auto coarse = build_space(coarse_mesh, 1, {});
    auto fine = build_space(fine_mesh, 1, {});
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ux(0.0, 1.0);
    FeFunction f{coarse, {}};
    f.coefficients.resize(coarse->n_dofs());
    for (double& c : f.coefficients) c = u(rng);
    FeFunction lifted = prolongate(f, fine);
    for (int i = 0; i < 100; ++i) {
      const Vec2 p{ux(rng), ux(rng)};
      CHECK(std::abs(evaluate(lifted, p) - evaluate(f, p)) < 1e-13);
    }
  }
  SUBCASE("P1 coarse into P2 fine stays exact") {
    auto coarse_mesh = make_interval_mesh(0.0, 1.0, 2);
    auto fine_mesh = refine_uniform(coarse_mesh);
    auto coarse = build_space(coarse_mesh, 1, {});
    auto fine = build_space(fine_mesh, 2, {});
    FeFunction f = interpolate(coarse, [](Vec2 p) { return 2.0 * p.x - 1.0; });
    FeFunction lifted = prolongate(f, fine);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int i = 0; i < 60; ++i) {
      const Vec2 p{ux(rng), 0.0};
      CHECK(std::abs(evaluate(lifted, p) - (2.0 * p.x - 1.0)) < 1e-13);
    }
  }
}

TEST_CASE("element maps push gradients consistently") {
  auto mesh = make_rect_mesh(0.0, 0.0, 2.0, 1.0, 2, 1);
  for (int e = 0; e < mesh->n_elements(); ++e) {
    auto map = element_map(*mesh, e);
    CHECK(map.det == doctest::Approx(2.0 * mesh->element_measure(e)));
    // A linear field x + 2y has constant physical gradient (1, 2); pulling
    // the reference gradient of its pullback must give it back.
    Vec2 grads[3];
    shape_ref_gradients(2, 1, {0.3, 0.3}, grads);
    double nodal[3];
    for (int i = 0; i < 3; ++i) {
      const Vec2 v = mesh->vertices[mesh->elements[e][i]];
      nodal[i] = v.x + 2.0 * v.y;
    }
    Vec2 acc{0.0, 0.0};
    for (int i = 0; i < 3; ++i) acc = acc + nodal[i] * map.push_gradient(grads[i]);
    CHECK(acc.x == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(acc.y == doctest::Approx(2.0).epsilon(1e-13));
  }
}
