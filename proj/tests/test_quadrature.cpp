#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "lsfem/quadrature.hpp"

using namespace lsfem;

namespace {

double apply_1d(const QuadratureRule& rule, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (size_t i = 0; i < rule.points.size(); ++i) acc += rule.weights[i] * f(rule.points[i].x);
  return acc;
}

double apply_2d(const QuadratureRule& rule, const std::function<double(double, double)>& f) {
  double acc = 0.0;
  for (size_t i = 0; i < rule.points.size(); ++i)
    acc += rule.weights[i] * f(rule.points[i].x, rule.points[i].y);
  return acc;
}

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// int over the unit triangle of x^a y^b = a! b! / (a+b+2)!.
double triangle_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

}  // namespace

TEST_CASE("gauss_legendre_01 basics") {
  for (int n = 1; n <= 12; ++n) {
    auto rule = gauss_legendre_01(n);
    REQUIRE(rule.points.size() == static_cast<size_t>(n));
    CHECK(rule.order >= 2 * n - 1);
    double wsum = 0.0;
    for (size_t i = 0; i < rule.weights.size(); ++i) {
      CHECK(rule.weights[i] > 0.0);
      CHECK(rule.points[i].x > 0.0);
      CHECK(rule.points[i].x < 1.0);
      if (i > 0) CHECK(rule.points[i].x > rule.points[i - 1].x);  // ascending nodes
      wsum += rule.weights[i];
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("gauss_legendre_01 monomial exactness up to 2n-1") {
  for (int n = 1; n <= 10; ++n) {
    auto rule = gauss_legendre_01(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      const double got = apply_1d(rule, [k](double x) { return std::pow(x, k); });
      const double expected = 1.0 / (k + 1);
      CHECK_MESSAGE(std::abs(got - expected) < 1e-14, "n=", n, " degree=", k);
    }
    // One degree past the rule must not be integrated exactly (sanity that the
    // order claim is sharp rather than an accident of symmetry).
    const double over = apply_1d(rule, [n](double x) { return std::pow(x, 2 * n); });
    CHECK(std::abs(over - 1.0 / (2 * n + 1)) > 1e-13);
  }
}

TEST_CASE("triangle_rule integrates monomials to the requested degree") {
  for (int order = 1; order <= 8; ++order) {
    auto rule = triangle_rule(order);
    CHECK(rule.order >= order);
    double wsum = 0.0;
    for (size_t i = 0; i < rule.weights.size(); ++i) {
      CHECK(rule.weights[i] > 0.0);
      const double x = rule.points[i].x, y = rule.points[i].y;
      CHECK(x >= 0.0);
      CHECK(y >= 0.0);
      CHECK(x + y <= 1.0 + 1e-14);
      wsum += rule.weights[i];
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
    for (int a = 0; a <= rule.order; ++a) {
      for (int b = 0; a + b <= rule.order; ++b) {
        const double got = apply_2d(rule, [a, b](double x, double y) {
          return std::pow(x, a) * std::pow(y, b);
        });
        CHECK_MESSAGE(std::abs(got - triangle_monomial(a, b)) < 1e-14, "order=", order, " x^", a,
                      " y^", b);
      }
    }
  }
}

TEST_CASE("default_quadrature meets the degree_trial + degree_test + 2 contract") {
  SUBCASE("P1/P1 1D smooth: exact to degree >= 4") {
    auto rule = default_quadrature(1, 1, 1);
    CHECK(rule.order >= 4);
    for (int k = 0; k <= rule.order; ++k) {
      const double got = apply_1d(rule, [k](double x) { return std::pow(x, k); });
      CHECK(got == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
  SUBCASE("P1/P2 2D smooth: exact to degree >= 5") {
    auto rule = default_quadrature(1, 2, 2);
    CHECK(rule.order >= 5);
    for (int a = 0; a <= 5; ++a)
      for (int b = 0; a + b <= 5; ++b) {
        const double got = apply_2d(rule, [a, b](double x, double y) {
          return std::pow(x, a) * std::pow(y, b);
        });
        CHECK(got == doctest::Approx(triangle_monomial(a, b)).epsilon(1e-13));
      }
  }
  SUBCASE("P2/P2 pairs raise the order accordingly") {
    CHECK(default_quadrature(2, 2, 1).order >= 6);
    CHECK(default_quadrature(2, 2, 2).order >= 6);
  }
}

TEST_CASE("graded_segment_rule shape") {
  auto rule = graded_segment_rule(false);
  CHECK(rule.points.size() >= 16);  // at least the advertised elevated point count
  double wsum = 0.0;
  for (size_t i = 0; i < rule.points.size(); ++i) {
    CHECK(rule.weights[i] > 0.0);
    CHECK(rule.points[i].x > 0.0);  // open toward the singular endpoint
    CHECK(rule.points[i].x < 1.0);
    wsum += rule.weights[i];
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));

  SUBCASE("mirrored variant reflects the nodes") {
    auto mirrored = graded_segment_rule(true);
    REQUIRE(mirrored.points.size() == rule.points.size());
    double best = 1.0;  // the graded end must cluster toward xi = 1 now
    for (size_t i = 0; i < mirrored.points.size(); ++i) best = std::min(best, 1.0 - mirrored.points[i].x);
    CHECK(best < 1e-4);
  }

  SUBCASE("still exact for moderate-degree polynomials") {
    for (int k = 0; k <= 7; ++k) {
      const double got = apply_1d(rule, [k](double x) { return std::pow(x, k); });
      CHECK(got == doctest::Approx(1.0 / (k + 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("graded rule handles the singular product integrals") {
  auto rule = graded_segment_rule(false);

  SUBCASE("int_0^h x^{-1/2} (x/h)(1 - x/h) dx, h = 0.5") {
    // Antiderivative gives (2/3) h^{1/2} - (2/5) h^{1/2} = (4/15) sqrt(h).
    const double h = 0.5;
    const double got = apply_1d(rule, [h](double xi) {
      const double x = h * xi;
      return h * (1.0 / std::sqrt(x)) * xi * (1.0 - xi);
    });
    const double exact = 4.0 / 15.0 * std::sqrt(0.5);
    CHECK(std::abs(exact - 0.18856180831641267) < 1e-15);
    CHECK(std::abs(got - exact) < 1e-6);
  }

  SUBCASE("x^{-1} against the hat product is finite and exact") {
    // x^{-1} * (x/h)(1-x/h) * h dxi reduces to (1 - xi): the pole cancels.
    const double got = apply_1d(rule, [](double xi) { return 1.0 - xi; });
    CHECK(got == doctest::Approx(0.5).epsilon(1e-13));
  }

  SUBCASE("x^{-1/2} itself (integrable pole)") {
    // The bare pole (nothing vanishes at 0) is the hardest case the grading
    // has to survive; basis products soften it by at least a factor x.
    const double got = apply_1d(rule, [](double xi) { return 1.0 / std::sqrt(xi); });
    CHECK(std::abs(got - 2.0) < 1e-4);
  }
}

TEST_CASE("default_quadrature singular kind selects the graded rule in 1D") {
  auto rule = default_quadrature(1, 2, 1, CoefficientKind::singular);
  auto graded = graded_segment_rule(false);
  REQUIRE(rule.points.size() == graded.points.size());
  for (size_t i = 0; i < rule.points.size(); ++i) {
    CHECK(rule.points[i].x == graded.points[i].x);
    CHECK(rule.weights[i] == graded.weights[i]);
  }
  CHECK_THROWS_AS(default_quadrature(1, 1, 2, CoefficientKind::singular), std::invalid_argument);
}
