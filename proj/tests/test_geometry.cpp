#include <doctest.h>

#include <cmath>
#include <random>

#include "foldsim/geometry.hpp"

using namespace foldsim;

namespace {

// Independent quadratic Lagrange interpolant through values at t = 0, 1/2, 1.
Vec2 lagrange_quadratic(const Vec2& a, const Vec2& m, const Vec2& b,
                        double t) {
  return a * ((1.0 - t) * (1.0 - 2.0 * t)) + m * (4.0 * t * (1.0 - t)) +
         b * (t * (2.0 * t - 1.0));
}

// Independent de Casteljau evaluation of a cubic.
Vec2 de_casteljau(const Vec2& p0, const Vec2& c1, const Vec2& c2,
                  const Vec2& p3, double t) {
  const Vec2 a = (1.0 - t) * p0 + t * c1;
  const Vec2 b = (1.0 - t) * c1 + t * c2;
  const Vec2 c = (1.0 - t) * c2 + t * p3;
  const Vec2 d = (1.0 - t) * a + t * b;
  const Vec2 e = (1.0 - t) * b + t * c;
  return (1.0 - t) * d + t * e;
}

// Brute-force nearest parameter by dense sampling plus local refinement.
double dense_nearest(const FoldCurve& curve, const Vec2& p, int samples) {
  double best_t = 0.0, best_d = (curve.eval(0.0) - p).squaredNorm();
  for (int i = 1; i <= samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const double d = (curve.eval(t) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  // Golden-section polish around the best sample.
  double lo = std::max(0.0, best_t - 2.0 / samples);
  double hi = std::min(1.0, best_t + 2.0 / samples);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - gr * (hi - lo);
    const double m2 = lo + gr * (hi - lo);
    if ((curve.eval(m1) - p).squaredNorm() < (curve.eval(m2) - p).squaredNorm())
      hi = m2;
    else
      lo = m1;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("parabolic arc matches the quadratic Lagrange oracle") {
  const Vec2 p0(0.0, 2.0), p1(9.6, 2.0), apex(4.8, 6.0);
  const FoldCurve arc = make_parabolic_arc(p0, p1, apex);
  CHECK(arc.kind() == CurveKind::Parabolic);
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    const Vec2 want = lagrange_quadratic(p0, apex, p1, t);
    CHECK((arc.eval(t) - want).norm() < 1e-13 * (1.0 + want.norm()));
  }
  // Endpoints reproduce the inputs bit-exactly.
  CHECK(arc.eval(0.0).x() == p0.x());
  CHECK(arc.eval(0.0).y() == p0.y());
  CHECK(arc.eval(1.0).x() == p1.x());
  CHECK(arc.eval(1.0).y() == p1.y());
  CHECK((arc.eval(0.5) - apex).norm() < 1e-14);
}

TEST_CASE("parabolic arc derivative matches central differences") {
  const FoldCurve arc =
      make_parabolic_arc(Vec2(0.0, 0.0), Vec2(4.0, 1.0), Vec2(1.0, 3.0));
  const double eps = 1e-6;
  for (double t : {0.1, 0.33, 0.5, 0.77, 0.9}) {
    const Vec2 fd = (arc.eval(t + eps) - arc.eval(t - eps)) / (2.0 * eps);
    CHECK((arc.derivative(t) - fd).norm() < 1e-8);
    const Vec2 fd2 =
        (arc.derivative(t + eps) - arc.derivative(t - eps)) / (2.0 * eps);
    CHECK((arc.second_derivative(t) - fd2).norm() < 1e-6);
  }
}

TEST_CASE("collinear parabola data is rejected") {
  CHECK_THROWS_AS(make_parabolic_arc(Vec2(0.0, 0.0), Vec2(2.0, 2.0),
                                     Vec2(1.0, 1.0)),
                  DegenerateCurve);
}

TEST_CASE("circular arc stays on the circle and picks the minor arc") {
  const Vec2 center(4.8, -2.0);
  const Vec2 p0(0.0, 2.0), p1(9.6, 2.0);
  const double r = (p0 - center).norm();
  const FoldCurve arc = make_circular_arc(p0, p1, center);
  double prev_angle = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const double t = i / 64.0;
    const Vec2 q = arc.eval(t);
    CHECK(std::abs((q - center).norm() - r) < 1e-12 * r);
    const double ang = std::atan2(q.y() - center.y(), q.x() - center.x());
    if (i > 0) {
      // Monotone angle along a minor arc.
      const double d = std::remainder(ang - prev_angle, 2.0 * M_PI);
      CHECK(std::abs(d) < M_PI / 4.0);
    }
    prev_angle = ang;
  }
  CHECK(arc.eval(0.0).x() == p0.x());
  CHECK(arc.eval(1.0).x() == p1.x());
  // The minor arc through these points bulges away from the center.
  CHECK(arc.eval(0.5).y() > 2.0);
  // Sweep angle below pi.
  const Vec2 a = p0 - center, b = p1 - center;
  const double sweep = std::acos(a.dot(b) / (a.norm() * b.norm()));
  double len = 0.0;
  Vec2 prev = arc.eval(0.0);
  for (int i = 1; i <= 4096; ++i) {
    const Vec2 q = arc.eval(i / 4096.0);
    len += (q - prev).norm();
    prev = q;
  }
  CHECK(len == doctest::Approx(r * sweep).epsilon(1e-6));
}

TEST_CASE("mismatched circle radii are rejected") {
  CHECK_THROWS_AS(
      make_circular_arc(Vec2(1.0, 0.0), Vec2(0.0, 1.5), Vec2(0.0, 0.0)),
      DegenerateCurve);
  // Coincident endpoints leave no arc to pick.
  CHECK_THROWS_AS(
      make_circular_arc(Vec2(1.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 0.0)),
      DegenerateCurve);
}

TEST_CASE("cubic arc matches de Casteljau") {
  const Vec2 p0(0.0, 0.0), c1(1.0, 2.0), c2(3.0, -1.0), p3(4.0, 1.0);
  const FoldCurve arc = make_cubic_bezier(p0, c1, c2, p3);
  for (int i = 0; i <= 50; ++i) {
    const double t = i / 50.0;
    CHECK((arc.eval(t) - de_casteljau(p0, c1, c2, p3, t)).norm() < 1e-13);
  }
  const double eps = 1e-6;
  for (double t : {0.2, 0.5, 0.8}) {
    const Vec2 fd = (arc.eval(t + eps) - arc.eval(t - eps)) / (2.0 * eps);
    CHECK((arc.derivative(t) - fd).norm() < 1e-7);
  }
  CHECK_THROWS_AS(make_cubic_bezier(p0, c1, c2, p0), DegenerateCurve);
}

TEST_CASE("polyline uses chord-length parametrization at constant speed") {
  const std::vector<Vec2> pts = {Vec2(0.0, 0.0), Vec2(3.0, 0.0),
                                 Vec2(3.0, 1.0)};
  const FoldCurve line = make_polyline(pts);
  const double total = 4.0;
  // Breakpoints sit at cumulative-length fractions.
  CHECK((line.eval(3.0 / total) - Vec2(3.0, 0.0)).norm() < 1e-14);
  CHECK((line.eval(1.5 / total) - Vec2(1.5, 0.0)).norm() < 1e-14);
  CHECK((line.eval(3.5 / total) - Vec2(3.0, 0.5)).norm() < 1e-14);
  // Constant speed equal to the total length.
  for (double t : {0.1, 0.4, 0.9})
    CHECK(line.derivative(t).norm() == doctest::Approx(total).epsilon(1e-13));
  CHECK_THROWS_AS(make_polyline({Vec2(1.0, 1.0), Vec2(1.0, 1.0)}),
                  DegenerateCurve);
  CHECK_THROWS_AS(make_polyline({Vec2(1.0, 1.0)}), DegenerateCurve);
}

TEST_CASE("closest point matches dense sampling on all curve kinds") {
  std::vector<FoldCurve> curves;
  curves.push_back(
      make_parabolic_arc(Vec2(0.0, 2.0), Vec2(9.6, 2.0), Vec2(4.8, 6.0)));
  curves.push_back(
      make_circular_arc(Vec2(0.0, 2.0), Vec2(9.6, 2.0), Vec2(4.8, -2.0)));
  curves.push_back(make_cubic_bezier(Vec2(0.0, 0.0), Vec2(2.0, 3.0),
                                     Vec2(5.0, -2.0), Vec2(7.0, 1.0)));
  curves.push_back(make_polyline(
      {Vec2(0.0, 0.0), Vec2(2.0, 1.0), Vec2(4.0, 0.5), Vec2(6.0, 2.0)}));

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ux(-2.0, 11.0), uy(-4.0, 8.0);
  for (const FoldCurve& c : curves) {
    for (int k = 0; k < 40; ++k) {
      const Vec2 p(ux(rng), uy(rng));
      const CurveProjection pr = c.closest_point(p);
      const double t_ref = dense_nearest(c, p, 20000);
      const double d_ref = (c.eval(t_ref) - p).norm();
      CHECK(pr.dist <= d_ref + 1e-9);
      CHECK((c.eval(pr.t) - pr.point).norm() < 1e-14 * (1.0 + pr.point.norm()));
      CHECK(pr.dist == doctest::Approx((pr.point - p).norm()).epsilon(1e-12));
      // Interior minima satisfy the stationarity condition.
      if (pr.t > 1e-9 && pr.t < 1.0 - 1e-9 &&
          c.kind() != CurveKind::Polyline) {
        const double g = (c.eval(pr.t) - p).dot(c.derivative(pr.t));
        CHECK(std::abs(g) < 1e-8 * (1.0 + pr.dist) * c.derivative(pr.t).norm());
      }
    }
  }
}

TEST_CASE("distance ties resolve to the smallest parameter") {
  // Every point of the arc is equidistant from the circle's center; rounding
  // makes the sampled distances near-ties, so only the distance is pinned.
  const FoldCurve arc =
      make_circular_arc(Vec2(1.0, 0.0), Vec2(-1.0, 0.0), Vec2(0.0, 0.0));
  const CurveProjection pr = arc.closest_point(Vec2(0.0, 0.0));
  CHECK(pr.dist == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pr.point.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // Symmetric query between polyline legs: the earlier leg wins.
  const FoldCurve vee =
      make_polyline({Vec2(-1.0, 1.0), Vec2(0.0, 0.0), Vec2(1.0, 1.0)});
  const CurveProjection pv = vee.closest_point(Vec2(0.0, 1.0));
  const CurveProjection pv_mirror = vee.closest_point(Vec2(0.0, 1.0));
  CHECK(pv.t == pv_mirror.t);
  CHECK(pv.t < 0.5);
}

TEST_CASE("queries beyond the endpoints clamp to the endpoints") {
  const FoldCurve arc =
      make_parabolic_arc(Vec2(0.0, 0.0), Vec2(4.0, 0.0), Vec2(2.0, 1.0));
  const CurveProjection a = arc.closest_point(Vec2(-5.0, 0.0));
  CHECK(a.t == 0.0);
  CHECK((a.point - Vec2(0.0, 0.0)).norm() == 0.0);
  const CurveProjection b = arc.closest_point(Vec2(9.0, 0.0));
  CHECK(b.t == 1.0);
  CHECK((b.point - Vec2(4.0, 0.0)).norm() == 0.0);
}

TEST_CASE("restricted-range projection respects the window") {
  const FoldCurve arc =
      make_parabolic_arc(Vec2(0.0, 0.0), Vec2(4.0, 0.0), Vec2(2.0, 1.0));
  const Vec2 p(0.5, 0.2);  // global minimum near t ~ 0.12
  const CurveProjection full = arc.closest_point(p);
  const CurveProjection win = arc.closest_point_in_range(p, 0.5, 1.0);
  CHECK(win.t >= 0.5);
  CHECK(win.t <= 1.0);
  CHECK(win.dist >= full.dist);
  // The window minimum sits at the nearer window edge here.
  CHECK(win.t == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_SUITE_END();
