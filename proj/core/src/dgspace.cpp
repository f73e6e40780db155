#include "foldsim/dgspace.hpp"

#include <vector>

namespace foldsim {

Vec3 DGField::value(int elem, const Vec2& ref) const {
  const auto phi = p2_shape(ref);
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < 6; ++a)
    for (int c = 0; c < 3; ++c) v[c] += phi[a] * coeffs[dof(elem, a, c)];
  return v;
}

Mat32 DGField::gradient(int elem, const Vec2& ref) const {
  const Grad6 dphi = p2_grad(ref);
  const MapData md = mesh->map_data(elem, ref);
  const Mat2 Kinv = md.J.inverse();
  Mat32 g = Mat32::Zero();
  for (int a = 0; a < 6; ++a) {
    const Vec2 gphys = Kinv.transpose() * dphi.row(a).transpose();
    for (int c = 0; c < 3; ++c)
      g.row(c) += coeffs[dof(elem, a, c)] * gphys.transpose();
  }
  return g;
}

Eigen::Matrix<double, 6, 3> DGField::block(int elem) const {
  Eigen::Matrix<double, 6, 3> b;
  for (int a = 0; a < 6; ++a)
    for (int c = 0; c < 3; ++c) b(a, c) = coeffs[dof(elem, a, c)];
  return b;
}

void DGField::set_block(int elem, const Eigen::Matrix<double, 6, 3>& b) {
  for (int a = 0; a < 6; ++a)
    for (int c = 0; c < 3; ++c) coeffs[dof(elem, a, c)] = b(a, c);
}

DGField zero_field(const FoldMesh& mesh) {
  DGField f;
  f.mesh = &mesh;
  f.coeffs = Eigen::VectorXd::Zero(18 * mesh.num_elements());
  return f;
}

DGField interpolate(const FoldMesh& mesh,
                    const std::function<Vec3(const Vec2&)>& f) {
  DGField out = zero_field(mesh);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int a = 0; a < 6; ++a) {
      const Vec3 v = f(mesh.nodes[mesh.elements[e].nodes[a]]);
      for (int c = 0; c < 3; ++c) out.coeffs[DGField::dof(e, a, c)] = v[c];
    }
  return out;
}

JumpAvg eval_jump_avg(const DGField& field, int edge, double s) {
  const FoldMesh& mesh = *field.mesh;
  const Edge& e = mesh.edges[edge];
  if (e.elem_minus < 0)
    throw NotInterior("edge " + std::to_string(edge) + " is on the boundary");
  const Vec2 rp = mesh.edge_ref_point(edge, 0, s);
  const Vec2 rm = mesh.edge_ref_point(edge, 1, s);
  const Vec3 vp = field.value(e.elem_plus, rp);
  const Vec3 vm = field.value(e.elem_minus, rm);
  const Mat32 gp = field.gradient(e.elem_plus, rp);
  const Mat32 gm = field.gradient(e.elem_minus, rm);
  JumpAvg out;
  out.value_jump = vp - vm;
  out.value_avg = 0.5 * (vp + vm);
  out.grad_jump = gp - gm;
  out.grad_avg = 0.5 * (gp + gm);
  return out;
}

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

Mat6 element_grad_gram(const FoldMesh& mesh, int elem,
                       const QuadratureRule& rule) {
  Mat6 m = Mat6::Zero();
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Grad6 dphi = p2_grad(rule.points[q]);
    const MapData md = mesh.map_data(elem, rule.points[q]);
    const Mat2 Kinv = md.J.inverse();
    Eigen::Matrix<double, 6, 2> gp;
    for (int a = 0; a < 6; ++a)
      gp.row(a) = (Kinv.transpose() * dphi.row(a).transpose()).transpose();
    const double w = rule.weights[q] * md.detJ;
    m += w * gp * gp.transpose();
  }
  return m;
}

}  // namespace

SpMat assemble_l2_mass_scalar(const FoldMesh& mesh, int quad_order) {
  const QuadratureRule rule = ref_quadrature(quad_order);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(36 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat6 m = element_mass(mesh, e, rule);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        trips.emplace_back(6 * e + a, 6 * e + b, m(a, b));
  }
  SpMat out(6 * mesh.num_elements(), 6 * mesh.num_elements());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat assemble_grad_gram_scalar(const FoldMesh& mesh, int quad_order) {
  const QuadratureRule rule = ref_quadrature(quad_order);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(36 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat6 m = element_grad_gram(mesh, e, rule);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        trips.emplace_back(6 * e + a, 6 * e + b, m(a, b));
  }
  SpMat out(6 * mesh.num_elements(), 6 * mesh.num_elements());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat expand_to_vector(const SpMat& scalar_op) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * scalar_op.nonZeros());
  for (int k = 0; k < scalar_op.outerSize(); ++k)
    for (SpMat::InnerIterator it(scalar_op, k); it; ++it)
      for (int c = 0; c < 3; ++c)
        trips.emplace_back(3 * it.row() + c, 3 * it.col() + c, it.value());
  SpMat out(3 * scalar_op.rows(), 3 * scalar_op.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat assemble_l2_mass(const FoldMesh& mesh, int quad_order) {
  return expand_to_vector(assemble_l2_mass_scalar(mesh, quad_order));
}

std::pair<std::vector<double>, double> elementwise_gradient_norms(
    const DGField& field, int quad_order) {
  const FoldMesh& mesh = *field.mesh;
  const QuadratureRule rule = ref_quadrature(quad_order);
  std::vector<double> per(mesh.num_elements(), 0.0);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Mat32 g = field.gradient(e, rule.points[q]);
      acc += rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ *
             g.squaredNorm();
    }
    per[e] = acc;
    total += acc;
  }
  return {per, total};
}

}  // namespace foldsim
