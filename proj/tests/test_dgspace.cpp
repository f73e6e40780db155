#include <doctest.h>

#include <cmath>
#include <random>

#include "foldsim/dgspace.hpp"

using namespace foldsim;

namespace {

// Independent dense element mass by brute-force high-order quadrature.
Eigen::Matrix<double, 6, 6> dense_element_mass(const FoldMesh& mesh, int e) {
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  const QuadratureRule rule = ref_quadrature(8);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto phi = p2_shape(rule.points[q]);
    const double w = rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) m(a, b) += w * phi[a] * phi[b];
  }
  return m;
}

double interp_l2_error(const FoldMesh& mesh,
                       const std::function<Vec3(const Vec2&)>& f) {
  const DGField fh = interpolate(mesh, f);
  const QuadratureRule rule = ref_quadrature(8);
  double err = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const MapData md = mesh.map_data(e, rule.points[q]);
      err += rule.weights[q] * md.detJ *
             (fh.value(e, rule.points[q]) - f(md.x)).squaredNorm();
    }
  return std::sqrt(err);
}

}  // namespace

TEST_SUITE_BEGIN("dgspace");

TEST_CASE("interpolation reproduces quadratics pointwise") {
  const FoldMesh mesh = build_rect_mesh(2.0, 1.0, 0.5);
  const auto f = [](const Vec2& x) {
    return Vec3(x.x() * x.x() - 0.5 * x.y() * x.y() + x.x() * x.y(),
                2.0 * x.x() + 1.0, x.y() * x.y());
  };
  const DGField fh = interpolate(mesh, f);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(0.05, 0.4);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec2 ref(uni(rng), uni(rng));
    const MapData md = mesh.map_data(e, ref);
    CHECK((fh.value(e, ref) - f(md.x)).norm() < 1e-13);
  }
}

TEST_CASE("gradient of the identity embedding is the identity") {
  const FoldMesh mesh = build_rect_mesh(2.0, 1.0, 0.5);
  const DGField id = interpolate(
      mesh, [](const Vec2& x) { return Vec3(x.x(), x.y(), 0.0); });
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat32 g = id.gradient(e, Vec2(0.2, 0.4));
    Mat32 want;
    want << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
    CHECK((g - want).norm() < 1e-13);
  }
  const auto [per_elem, total] = elementwise_gradient_norms(id);
  CHECK(total == doctest::Approx(2.0 * 2.0).epsilon(1e-13));
  double sum = 0.0;
  for (double v : per_elem) sum += v;
  CHECK(sum == doctest::Approx(total).epsilon(1e-14));
}

TEST_CASE("constant fields square to three times the area under the mass") {
  const FoldMesh mesh = build_rect_mesh(1.5, 1.0, 0.5);
  const SpMat M = assemble_l2_mass(mesh);
  DGField ones = zero_field(mesh);
  ones.coeffs.setOnes();
  const double v = ones.coeffs.dot(M * ones.coeffs);
  CHECK(v == doctest::Approx(3.0 * 1.5).epsilon(1e-13));
}

TEST_CASE("scalar mass agrees with the dense element oracle") {
  FoldMesh mesh = build_rect_mesh(2.0, 1.5, 0.5);
  mesh = snap_to_curve(mesh, make_parabolic_arc(Vec2(0.0, 0.5), Vec2(2.0, 0.5),
                                                Vec2(1.0, 1.1)));
  const SpMat M = assemble_l2_mass_scalar(mesh);
  for (int e : {0, 3, 11, mesh.num_elements() - 1}) {
    const auto dense = dense_element_mass(mesh, e);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        CHECK(M.coeff(6 * e + a, 6 * e + b) ==
              doctest::Approx(dense(a, b)).epsilon(1e-12));
  }
  // Strictly block diagonal.
  CHECK(M.nonZeros() <= 36 * mesh.num_elements());
}

TEST_CASE("gradient gram of a linear scalar field matches its slope") {
  const FoldMesh mesh = build_rect_mesh(1.0, 1.0, 0.5);
  const SpMat G = assemble_grad_gram_scalar(mesh);
  // Scalar field 3x - 2y per element: integral of |grad|^2 = 13 * area.
  Eigen::VectorXd u(6 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int a = 0; a < 6; ++a) {
      const Vec2 x = mesh.nodes[mesh.elements[e].nodes[a]];
      u[6 * e + a] = 3.0 * x.x() - 2.0 * x.y();
    }
  CHECK(u.dot(G * u) == doctest::Approx(13.0).epsilon(1e-13));
}

TEST_CASE("interpolation converges at third order in L2") {
  const auto f = [](const Vec2& x) {
    return Vec3(std::sin(2.0 * x.x()) * std::cos(x.y()), 0.0,
                std::cos(1.5 * x.x() + x.y()));
  };
  const double e1 = interp_l2_error(build_rect_mesh(1.0, 1.0, 0.251), f);
  const double e2 = interp_l2_error(build_rect_mesh(1.0, 1.0, 0.1251), f);
  const double ratio = e1 / e2;
  CHECK(ratio > 6.0);
  CHECK(ratio < 10.0);
}

TEST_CASE("cylinder embedding has squared gradient close to twice the area") {
  const FoldMesh mesh = build_rect_mesh(2.0, 1.0, 0.125);
  const DGField y = interpolate(mesh, [](const Vec2& x) {
    return Vec3(std::sin(x.x()), x.y(), std::cos(x.x()));
  });
  const auto [per_elem, total] = elementwise_gradient_norms(y);
  CHECK(std::abs(total - 2.0 * 2.0) < 0.01 * 2.0 * 2.0);
}

TEST_CASE("jumps carry the plus-minus orientation") {
  const FoldMesh mesh = build_rect_mesh(1.0, 1.0, 0.5);
  const int ei = mesh.interior_edges().front();
  const Edge& ed = mesh.edges[ei];
  DGField f = zero_field(mesh);
  Eigen::Matrix<double, 6, 3> block = Eigen::Matrix<double, 6, 3>::Zero();
  block.col(0).setConstant(2.5);
  f.set_block(ed.elem_plus, block);
  const JumpAvg ja = eval_jump_avg(f, ei, 0.37);
  CHECK(ja.value_jump.x() == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(ja.value_avg.x() == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(ja.value_jump.y() == 0.0);

  // Flipping the carrier to the minus element flips the sign.
  DGField g = zero_field(mesh);
  g.set_block(ed.elem_minus, block);
  const JumpAvg jb = eval_jump_avg(g, ei, 0.37);
  CHECK(jb.value_jump.x() == doctest::Approx(-2.5).epsilon(1e-14));
}

TEST_CASE("continuous interpolants have zero jumps everywhere") {
  FoldMesh mesh = build_rect_mesh(2.0, 2.0, 0.5);
  mesh = snap_to_curve(mesh, make_circular_arc(Vec2(0.0, 0.5), Vec2(2.0, 0.5),
                                               Vec2(1.0, -0.8)));
  const DGField f = interpolate(mesh, [](const Vec2& x) {
    return Vec3(x.x() * x.y(), x.x() - x.y(), x.x() * x.x());
  });
  for (int ei : mesh.interior_edges())
    for (double u : {0.1, 0.5, 0.9}) {
      const JumpAvg ja = eval_jump_avg(f, ei, u);
      CHECK(ja.value_jump.norm() < 1e-12);
    }
}

TEST_CASE("gradient jumps vanish only for globally smooth fields") {
  const FoldMesh mesh = build_rect_mesh(1.0, 1.0, 0.5);
  const DGField affine = interpolate(
      mesh, [](const Vec2& x) { return Vec3(x.x() + 2.0 * x.y(), 0.0, 1.0); });
  for (int ei : mesh.interior_edges()) {
    const JumpAvg ja = eval_jump_avg(affine, ei, 0.5);
    CHECK(ja.grad_jump.norm() < 1e-13);
    CHECK((ja.grad_avg.row(0) - Eigen::RowVector2d(1.0, 2.0)).norm() < 1e-13);
  }
}

TEST_CASE("boundary edges reject trace evaluation") {
  const FoldMesh mesh = build_rect_mesh(1.0, 1.0, 0.5);
  const DGField f = zero_field(mesh);
  int boundary_edge = -1;
  for (int i = 0; i < mesh.num_edges(); ++i)
    if (mesh.edges[i].elem_minus < 0) {
      boundary_edge = i;
      break;
    }
  REQUIRE(boundary_edge >= 0);
  CHECK_THROWS_AS(eval_jump_avg(f, boundary_edge, 0.5), NotInterior);
}

TEST_CASE("vector expansion acts componentwise") {
  const FoldMesh mesh = build_rect_mesh(1.0, 1.0, 0.5);
  const SpMat S = assemble_grad_gram_scalar(mesh);
  const SpMat V = expand_to_vector(S);
  CHECK(V.rows() == 3 * S.rows());
  std::mt19937 rng(17);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd y(V.rows());
  for (int i = 0; i < y.size(); ++i) y[i] = gauss(rng);
  const Eigen::VectorXd out = V * y;
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXd yc(S.rows());
    for (int r = 0; r < S.rows(); ++r) yc[r] = y[3 * r + c];
    const Eigen::VectorXd outc = S * yc;
    for (int r = 0; r < S.rows(); ++r)
      CHECK(out[3 * r + c] == doctest::Approx(outc[r]).epsilon(1e-13));
  }
}

TEST_SUITE_END();
