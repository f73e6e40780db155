#include "foldsim/hessian.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace foldsim {

namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;

Mat6 element_mass(const FoldMesh& mesh, int elem, const QuadratureRule& rule) {
  Mat6 m = Mat6::Zero();
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto phi = p2_shape(rule.points[q]);
    const double w = rule.weights[q] * mesh.map_data(elem, rule.points[q]).detJ;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) m(a, b) += w * phi[a] * phi[b];
  }
  return m;
}

}  // namespace

Mat2 HessianField::eval(int elem, int comp, const Vec2& ref) const {
  const auto phi = p2_shape(ref);
  Mat2 out = Mat2::Zero();
  for (int a = 0; a < 6; ++a)
    for (int m = 0; m < 4; ++m)
      out(m / 2, m % 2) += phi[a] * coeffs[dof(elem, comp, a, m)];
  return out;
}

double HessianField::frob_sq(int elem, const Vec2& ref) const {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += eval(elem, c, ref).squaredNorm();
  return s;
}

Mat2 PatchMatrixField::eval(int slot, const Vec2& ref) const {
  const auto phi = p2_shape(ref);
  Mat2 out = Mat2::Zero();
  for (int a = 0; a < 6; ++a) out += phi[a] * coef[slot][a];
  return out;
}

std::array<Mat2, 6> shape_physical_hessians(const FoldMesh& mesh, int elem,
                                            const Vec2& ref) {
  const MapData md = mesh.map_data(elem, ref);
  const Mat2 K = md.J.inverse();  // K(alpha, i) = d ref_alpha / d x_i
  const auto X2 = mesh.map_second(elem);

  // Second derivatives of the inverse map: for quadratic maps X2 is constant
  // but K varies, so this is evaluated pointwise.
  std::array<Mat2, 2> T2{Mat2::Zero(), Mat2::Zero()};
  if (X2[0].cwiseAbs().maxCoeff() > 0.0 || X2[1].cwiseAbs().maxCoeff() > 0.0) {
    const Mat2 W0 = K.transpose() * X2[0] * K;
    const Mat2 W1 = K.transpose() * X2[1] * K;
    for (int alpha = 0; alpha < 2; ++alpha)
      T2[alpha] = -(K(alpha, 0) * W0 + K(alpha, 1) * W1);
  }

  const Grad6 dphi = p2_grad(ref);
  const auto& hess = p2_hess();
  std::array<Mat2, 6> out;
  for (int b = 0; b < 6; ++b) {
    out[b] = K.transpose() * hess[b] * K + dphi(b, 0) * T2[0] +
             dphi(b, 1) * T2[1];
  }
  return out;
}

std::array<Mat2, 3> pointwise_hessian(const DGField& field, int elem,
                                      const Vec2& ref) {
  const auto hb = shape_physical_hessians(*field.mesh, elem, ref);
  std::array<Mat2, 3> out{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
  for (int a = 0; a < 6; ++a)
    for (int c = 0; c < 3; ++c)
      out[c] += field.coeffs[DGField::dof(elem, a, c)] * hb[a];
  return out;
}

namespace {

// Shared edge-patch data for the lifting definitions: per quadrature point,
// the curved line element, normal, and both elements' trace data.
struct EdgeQuadPoint {
  double wjac = 0.0;  // quadrature weight times line element
  Vec2 normal = Vec2::Zero();
  std::array<std::array<double, 6>, 2> trace{};      // shape values per side
  std::array<std::array<Vec2, 6>, 2> grad{};         // physical gradients
};

std::vector<EdgeQuadPoint> edge_patch_quadrature(const FoldMesh& mesh,
                                                 int edge, int order) {
  const Edge& e = mesh.edges[edge];
  const EdgeQuadratureRule rule = edge_quadrature(order);
  std::vector<EdgeQuadPoint> out(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double u = rule.points[q];
    const EdgePoint ep = mesh.edge_point(edge, u);
    EdgeQuadPoint& p = out[q];
    p.wjac = rule.weights[q] * ep.jac;
    p.normal = ep.normal;
    const int elems[2] = {e.elem_plus, e.elem_minus};
    for (int side = 0; side < 2; ++side) {
      if (elems[side] < 0) continue;
      const Vec2 ref = mesh.edge_ref_point(edge, side, u);
      const auto phi = p2_shape(ref);
      const Grad6 dphi = p2_grad(ref);
      const Mat2 Kinv = mesh.map_data(elems[side], ref).J.inverse();
      for (int a = 0; a < 6; ++a) {
        p.trace[side][a] = phi[a];
        p.grad[side][a] = Kinv.transpose() * dphi.row(a).transpose();
      }
    }
  }
  return out;
}

PatchMatrixField solve_patch(const FoldMesh& mesh, int edge,
                             const std::array<std::array<Mat2, 6>, 2>& rhs,
                             int quad_order) {
  const Edge& e = mesh.edges[edge];
  PatchMatrixField out;
  out.edge = edge;
  out.elems = {e.elem_plus, e.elem_minus};
  const QuadratureRule rule = ref_quadrature(quad_order);
  for (int slot = 0; slot < 2; ++slot) {
    const Mat6 m = element_mass(mesh, out.elems[slot], rule);
    const auto llt = m.llt();
    if (llt.info() != Eigen::Success)
      throw InternalError("singular element mass in an edge patch");
    // Four independent scalar solves, one per matrix entry.
    for (int entry = 0; entry < 4; ++entry) {
      Eigen::Matrix<double, 6, 1> r;
      for (int a = 0; a < 6; ++a) r[a] = rhs[slot][a](entry / 2, entry % 2);
      const Eigen::Matrix<double, 6, 1> c = llt.solve(r);
      for (int a = 0; a < 6; ++a) out.coef[slot][a](entry / 2, entry % 2) = c[a];
    }
  }
  return out;
}

}  // namespace

PatchMatrixField lift_value_jump(const FoldMesh& mesh, int edge,
                                 const std::function<double(double)>& vhat,
                                 int quad_order) {
  const Edge& e = mesh.edges[edge];
  if (e.elem_minus < 0)
    throw NotInterior("value-jump lifting needs an interior edge");
  const EdgeQuadratureRule rule = edge_quadrature(quad_order);
  const auto pts = edge_patch_quadrature(mesh, edge, quad_order);
  std::array<std::array<Mat2, 6>, 2> rhs{};
  for (auto& side : rhs)
    for (auto& m : side) m.setZero();
  for (std::size_t q = 0; q < pts.size(); ++q) {
    const double v = vhat(rule.points[q]);
    for (int slot = 0; slot < 2; ++slot)
      for (int a = 0; a < 6; ++a) {
        const Vec2& g = pts[q].grad[slot][a];
        // 0.5 * v * d_i(phi_a) * normal_j, integrated along the edge
        rhs[slot][a] +=
            (0.5 * pts[q].wjac * v) * (g * pts[q].normal.transpose());
      }
  }
  return solve_patch(mesh, edge, rhs, quad_order);
}

PatchMatrixField lift_gradient_jump(const FoldMesh& mesh, int edge,
                                    const std::function<Vec2(double)>& what,
                                    int quad_order) {
  const Edge& e = mesh.edges[edge];
  if (e.elem_minus < 0)
    throw NotInterior("gradient-jump lifting needs an interior edge");
  if (e.tag == EdgeTag::Fold)
    throw ExcludedEdge("gradient-jump lifting is not defined across folds");
  const EdgeQuadratureRule rule = edge_quadrature(quad_order);
  const auto pts = edge_patch_quadrature(mesh, edge, quad_order);
  std::array<std::array<Mat2, 6>, 2> rhs{};
  for (auto& side : rhs)
    for (auto& m : side) m.setZero();
  for (std::size_t q = 0; q < pts.size(); ++q) {
    const Vec2 w = what(rule.points[q]);
    for (int slot = 0; slot < 2; ++slot)
      for (int a = 0; a < 6; ++a) {
        // 0.5 * w_i * phi_a * normal_j
        rhs[slot][a] += (0.5 * pts[q].wjac * pts[q].trace[slot][a]) *
                        (w * pts[q].normal.transpose());
      }
  }
  return solve_patch(mesh, edge, rhs, quad_order);
}

HessianOperator::HessianOperator(const FoldMesh& mesh, int quad_order,
                                 int edge_order)
    : mesh_(&mesh), quad_order_(quad_order) {
  const int ne = mesh.num_elements();
  const QuadratureRule rule = ref_quadrature(quad_order);

  std::vector<Eigen::LLT<Mat6>> mass_llt(ne);
  std::vector<Eigen::Triplet<double>> mass_trips;
  mass_trips.reserve(ne * 6 * 6 * 4);
  for (int e = 0; e < ne; ++e) {
    const Mat6 m = element_mass(mesh, e, rule);
    mass_llt[e] = m.llt();
    if (mass_llt[e].info() != Eigen::Success)
      throw InternalError("singular element mass matrix");
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        for (int entry = 0; entry < 4; ++entry)
          mass_trips.emplace_back(24 * e + 4 * a + entry,
                                  24 * e + 4 * b + entry, m(a, b));
  }
  mass_.resize(24 * ne, 24 * ne);
  mass_.setFromTriplets(mass_trips.begin(), mass_trips.end());

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(ne * 24 * 6 + mesh.num_edges() * 2 * 24 * 12);

  // Elementwise projected second derivative.
  for (int e = 0; e < ne; ++e) {
    Eigen::Matrix<double, 6, 24> rhs = Eigen::Matrix<double, 6, 24>::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = p2_shape(rule.points[q]);
      const auto hb = shape_physical_hessians(mesh, e, rule.points[q]);
      const double w =
          rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
          for (int entry = 0; entry < 4; ++entry)
            rhs(a, 4 * b + entry) +=
                w * phi[a] * hb[b](entry / 2, entry % 2);
    }
    const Eigen::Matrix<double, 6, 24> coef = mass_llt[e].solve(rhs);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        for (int entry = 0; entry < 4; ++entry)
          trips.emplace_back(24 * e + 4 * a + entry, 6 * e + b,
                             coef(a, 4 * b + entry));
  }

  // Edge liftings: value jumps on every interior edge (folds included),
  // gradient jumps only across non-fold interior edges.
  for (int ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& ed = mesh.edges[ei];
    if (ed.elem_minus < 0) continue;
    const bool with_grad = ed.tag != EdgeTag::Fold;
    const auto pts = edge_patch_quadrature(mesh, ei, edge_order);
    const int elems[2] = {ed.elem_plus, ed.elem_minus};

    for (int t = 0; t < 2; ++t) {
      // Rows: target shape index a; columns: 4*(6*s + b) + entry, where s
      // is the source side, b the source shape index.
      Eigen::Matrix<double, 6, 48> rhs = Eigen::Matrix<double, 6, 48>::Zero();
      for (const EdgeQuadPoint& p : pts) {
        for (int s = 0; s < 2; ++s) {
          const double sign = s == 0 ? 1.0 : -1.0;
          for (int b = 0; b < 6; ++b) {
            const int col0 = 4 * (6 * s + b);
            for (int a = 0; a < 6; ++a) {
              for (int entry = 0; entry < 4; ++entry) {
                const int i = entry / 2, j = entry % 2;
                // value jump: source trace against target divergence row
                double v = p.trace[s][b] * p.grad[t][a][i];
                // gradient jump: source gradient against target trace
                if (with_grad) v -= p.grad[s][b][i] * p.trace[t][a];
                rhs(a, col0 + entry) +=
                    0.5 * p.wjac * sign * p.normal[j] * v;
              }
            }
          }
        }
      }
      const Eigen::Matrix<double, 6, 48> coef = mass_llt[elems[t]].solve(rhs);
      for (int s = 0; s < 2; ++s)
        for (int b = 0; b < 6; ++b)
          for (int a = 0; a < 6; ++a)
            for (int entry = 0; entry < 4; ++entry)
              trips.emplace_back(24 * elems[t] + 4 * a + entry,
                                 6 * elems[s] + b,
                                 coef(a, 4 * (6 * s + b) + entry));
    }
  }

  op_.resize(24 * ne, 6 * ne);
  op_.setFromTriplets(trips.begin(), trips.end());
}

HessianField HessianOperator::apply(const DGField& field) const {
  const int ne = mesh_->num_elements();
  HessianField out;
  out.mesh = mesh_;
  out.coeffs = Eigen::VectorXd::Zero(72 * ne);
  Eigen::VectorXd x(6 * ne), y;
  for (int c = 0; c < 3; ++c) {
    for (int e = 0; e < ne; ++e)
      for (int a = 0; a < 6; ++a) x[6 * e + a] = field.coeffs[DGField::dof(e, a, c)];
    y = op_ * x;
    for (int e = 0; e < ne; ++e)
      for (int a = 0; a < 6; ++a)
        for (int m = 0; m < 4; ++m)
          out.coeffs[HessianField::dof(e, c, a, m)] = y[24 * e + 4 * a + m];
  }
  return out;
}

HessianField discrete_hessian(const HessianOperator& op,
                              const DGField& field) {
  return op.apply(field);
}

double h2_seminorm(const DGField& field, int quad_order) {
  const FoldMesh& mesh = *field.mesh;
  const QuadratureRule rule = ref_quadrature(quad_order);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto h = pointwise_hessian(field, e, rule.points[q]);
      const double w =
          rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
      total += w * (h[0].squaredNorm() + h[1].squaredNorm() +
                    h[2].squaredNorm());
    }
  const EdgeQuadratureRule erule = edge_quadrature(quad_order);
  for (int ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& ed = mesh.edges[ei];
    if (ed.elem_minus < 0) continue;
    double vj = 0.0, gj = 0.0;
    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      const double u = erule.points[q];
      const JumpAvg ja = eval_jump_avg(field, ei, u);
      const double wj = erule.weights[q] * mesh.edge_point(ei, u).jac;
      vj += wj * ja.value_jump.squaredNorm();
      gj += wj * ja.grad_jump.squaredNorm();
    }
    total += vj / (ed.h * ed.h * ed.h);
    if (ed.tag != EdgeTag::Fold) total += gj / ed.h;
  }
  return total;
}

}  // namespace foldsim
