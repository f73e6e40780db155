#include <doctest.h>

#include <cmath>

#include "foldsim/mesh.hpp"

using namespace foldsim;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Exact monomial moments of the reference triangle.
double exact_moment(int p, int q) {
  return factorial(p) * factorial(q) / factorial(p + q + 2);
}

}  // namespace

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("triangle rules integrate monomials exactly up to their order") {
  for (int order = 1; order <= 8; ++order) {
    const QuadratureRule rule = ref_quadrature(order);
    CHECK(rule.order >= order);
    for (int p = 0; p <= rule.order; ++p)
      for (int q = 0; p + q <= rule.order; ++q) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.points.size(); ++i)
          s += rule.weights[i] * std::pow(rule.points[i].x(), p) *
               std::pow(rule.points[i].y(), q);
        CAPTURE(order);
        CAPTURE(p);
        CAPTURE(q);
        CHECK(std::abs(s - exact_moment(p, q)) < 1e-15);
      }
  }
}

TEST_CASE("x^2 y^2 integrates to 1/180 at order 4") {
  const QuadratureRule rule = ref_quadrature(4);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i)
    s += rule.weights[i] * rule.points[i].x() * rule.points[i].x() *
         rule.points[i].y() * rule.points[i].y();
  CHECK(std::abs(s - 1.0 / 180.0) < 1e-16);
}

TEST_CASE("triangle rules have positive interior points and weights") {
  for (int order = 1; order <= 8; ++order) {
    const QuadratureRule rule = ref_quadrature(order);
    double wsum = 0.0;
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      CHECK(rule.weights[i] > 0.0);
      wsum += rule.weights[i];
      const double x = rule.points[i].x(), y = rule.points[i].y();
      CHECK(x > 0.0);
      CHECK(y > 0.0);
      CHECK(x + y < 1.0);
    }
    CHECK(std::abs(wsum - 0.5) < 1e-15);
  }
}

TEST_CASE("unsupported triangle orders are rejected") {
  CHECK_THROWS_AS(ref_quadrature(0), Unsupported);
  CHECK_THROWS_AS(ref_quadrature(9), Unsupported);
}

TEST_CASE("edge rules integrate monomials on [0,1]") {
  for (int order = 1; order <= 9; ++order) {
    const EdgeQuadratureRule rule = edge_quadrature(order);
    CHECK(rule.order >= order);
    double wsum = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(std::abs(wsum - 1.0) < 1e-15);
    for (int p = 0; p <= rule.order; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.points.size(); ++i)
        s += rule.weights[i] * std::pow(rule.points[i], p);
      CAPTURE(order);
      CAPTURE(p);
      CHECK(std::abs(s - 1.0 / (p + 1)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(edge_quadrature(0), Unsupported);
  CHECK_THROWS_AS(edge_quadrature(10), Unsupported);
}

TEST_CASE("quadratic shape functions are nodal and sum to one") {
  const Vec2 nodes[6] = {ref_corner(0),           ref_corner(1),
                         ref_corner(2),           ref_edge_point(0, 0.5),
                         ref_edge_point(1, 0.5),  ref_edge_point(2, 0.5)};
  for (int a = 0; a < 6; ++a) {
    const auto phi = p2_shape(nodes[a]);
    for (int b = 0; b < 6; ++b)
      CHECK(phi[b] == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-14));
  }
  const QuadratureRule rule = ref_quadrature(4);
  for (const Vec2& p : rule.points) {
    const auto phi = p2_shape(p);
    double s = 0.0;
    for (double v : phi) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    const Grad6 g = p2_grad(p);
    CHECK(g.colwise().sum().norm() < 1e-14);
  }
}

TEST_CASE("shape gradients and second derivatives match finite differences") {
  const Vec2 p(0.31, 0.22);
  const double eps = 1e-6;
  const Grad6 g = p2_grad(p);
  for (int a = 0; a < 6; ++a) {
    for (int d = 0; d < 2; ++d) {
      Vec2 dp = Vec2::Zero();
      dp[d] = eps;
      const double fd =
          (p2_shape(p + dp)[a] - p2_shape(p - dp)[a]) / (2.0 * eps);
      CHECK(g(a, d) == doctest::Approx(fd).epsilon(1e-7));
    }
    const Mat2& h = p2_hess()[a];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Vec2 dj = Vec2::Zero();
        dj[j] = eps;
        const double fd =
            (p2_grad(p + dj)(a, i) - p2_grad(p - dj)(a, i)) / (2.0 * eps);
        CHECK(h(i, j) == doctest::Approx(fd).epsilon(1e-6));
      }
  }
}

TEST_CASE("reference edges connect the right corners") {
  for (int k = 0; k < 3; ++k) {
    CHECK((ref_edge_point(k, 0.0) - ref_corner((k + 1) % 3)).norm() == 0.0);
    CHECK((ref_edge_point(k, 1.0) - ref_corner((k + 2) % 3)).norm() == 0.0);
  }
}

TEST_SUITE_END();
