#include <cmath>

#include "foldsim/mesh.hpp"

namespace foldsim {

// Barycentric coordinates on the reference triangle: l0 = 1-xi-eta, l1 = xi,
// l2 = eta. Corner shape functions are l(2l-1); midpoint 3+k pairs the two
// corners adjacent to edge k.
std::array<double, 6> p2_shape(const Vec2& ref) {
  const double l0 = 1.0 - ref.x() - ref.y(), l1 = ref.x(), l2 = ref.y();
  return {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
          4.0 * l1 * l2, 4.0 * l2 * l0, 4.0 * l0 * l1};
}

Grad6 p2_grad(const Vec2& ref) {
  const double l0 = 1.0 - ref.x() - ref.y(), l1 = ref.x(), l2 = ref.y();
  const Vec2 g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);
  Grad6 d;
  d.row(0) = ((4.0 * l0 - 1.0) * g0).transpose();
  d.row(1) = ((4.0 * l1 - 1.0) * g1).transpose();
  d.row(2) = ((4.0 * l2 - 1.0) * g2).transpose();
  d.row(3) = (4.0 * (l2 * g1 + l1 * g2)).transpose();
  d.row(4) = (4.0 * (l0 * g2 + l2 * g0)).transpose();
  d.row(5) = (4.0 * (l1 * g0 + l0 * g1)).transpose();
  return d;
}

const std::array<Mat2, 6>& p2_hess() {
  static const std::array<Mat2, 6> h = [] {
    const Vec2 g[3] = {Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    std::array<Mat2, 6> out;
    for (int i = 0; i < 3; ++i) out[i] = 4.0 * g[i] * g[i].transpose();
    for (int k = 0; k < 3; ++k) {
      const Vec2 &a = g[(k + 1) % 3], &b = g[(k + 2) % 3];
      out[3 + k] = 4.0 * (a * b.transpose() + b * a.transpose());
    }
    return out;
  }();
  return h;
}

Vec2 ref_corner(int k) {
  static const Vec2 c[3] = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  return c[k % 3];
}

Vec2 ref_edge_point(int k, double u) {
  return (1.0 - u) * ref_corner((k + 1) % 3) + u * ref_corner((k + 2) % 3);
}

namespace {

void orb1(QuadratureRule& r, double w) {
  r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  r.weights.push_back(w);
}

// Three permutations of barycentric (a, a, 1-2a); w is the per-point weight
// already scaled to the reference area 1/2.
void orb3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.emplace_back(a, a);
  r.points.emplace_back(b, a);
  r.points.emplace_back(a, b);
  r.weights.insert(r.weights.end(), 3, w);
}

// Six permutations of barycentric (a, b, 1-a-b).
void orb6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const double xs[6] = {a, b, a, c, b, c};
  const double ys[6] = {b, a, c, a, c, b};
  for (int i = 0; i < 6; ++i) r.points.emplace_back(xs[i], ys[i]);
  r.weights.insert(r.weights.end(), 6, w);
}

}  // namespace

QuadratureRule ref_quadrature(int order) {
  if (order < 1 || order > 8)
    throw Unsupported("quadrature order " + std::to_string(order) +
                      " outside the supported range 1..8");
  QuadratureRule r;
  if (order == 1) {
    orb1(r, 0.5);
    r.order = 1;
  } else if (order == 2) {
    orb3(r, 1.0 / 6.0, 1.0 / 6.0);
    r.order = 2;
  } else if (order <= 4) {
    orb3(r, 0.44594849091596489, 0.11169079483900573);
    orb3(r, 0.091576213509770743, 0.054975871827660934);
    r.order = 4;
  } else if (order == 5) {
    const double s = std::sqrt(15.0);
    orb1(r, 9.0 / 80.0);
    orb3(r, (6.0 + s) / 21.0, (155.0 + s) / 2400.0);
    orb3(r, (6.0 - s) / 21.0, (155.0 - s) / 2400.0);
    r.order = 5;
  } else if (order == 6) {
    orb3(r, 0.063089014491502228, 0.025422453185103408);
    orb3(r, 0.24928674517091042, 0.058393137863189683);
    orb6(r, 0.053145049844816947, 0.31035245103378441, 0.041425537809186788);
    r.order = 6;
  } else {
    orb1(r, 0.072157803838893584);
    orb3(r, 0.45929258829272316, 0.047545817133642312);
    orb3(r, 0.17056930775176021, 0.051608685267359125);
    orb3(r, 0.050547228317030975, 0.016229248811599040);
    orb6(r, 0.26311282963463811, 0.72849239295540428, 0.013615157087217497);
    r.order = 8;
  }
  return r;
}

EdgeQuadratureRule edge_quadrature(int order) {
  if (order < 1 || order > 9)
    throw Unsupported("edge quadrature order " + std::to_string(order) +
                      " outside the supported range 1..9");
  const int n = (order + 2) / 2;  // n-point Gauss is exact to degree 2n-1
  // Gauss-Legendre nodes on [-1,1] from closed forms, then mapped to [0,1].
  std::vector<double> x, w;
  switch (n) {
    case 1:
      x = {0.0};
      w = {2.0};
      break;
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      x = {-a, a};
      w = {1.0, 1.0};
      break;
    }
    case 3: {
      const double a = std::sqrt(3.0 / 5.0);
      x = {-a, 0.0, a};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      const double c = 2.0 * std::sqrt(6.0 / 5.0);
      const double a = std::sqrt((3.0 - c) / 7.0), b = std::sqrt((3.0 + c) / 7.0);
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    default: {
      const double c = 2.0 * std::sqrt(10.0 / 7.0);
      const double a = std::sqrt(5.0 - c) / 3.0, b = std::sqrt(5.0 + c) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      x = {-b, -a, 0.0, a, b};
      w = {wb, wa, 128.0 / 225.0, wa, wb};
      break;
    }
  }
  EdgeQuadratureRule r;
  r.order = 2 * n - 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.points.push_back(0.5 * (x[i] + 1.0));
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

}  // namespace foldsim
