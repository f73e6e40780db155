#include "foldsim/energy.hpp"

#include <vector>

namespace foldsim {

EnergyModel::EnergyModel(const FoldMesh& mesh, const EnergyParams& params,
                         const std::vector<DirichletPoint>& bc)
    : EnergyModel(std::make_shared<const HessianOperator>(
                      mesh, params.quad_order, params.edge_order),
                  params, bc) {}

EnergyModel::EnergyModel(std::shared_ptr<const HessianOperator> op,
                         const EnergyParams& params,
                         const std::vector<DirichletPoint>& bc)
    : op_(std::move(op)), params_(params), bc_(bc) {
  assemble();
}

void EnergyModel::assemble() {
  const FoldMesh& mesh = op_->mesh();
  const int ne = mesh.num_elements();

  // Bending block: quadratic form of the reconstructed Hessian in the
  // Hessian-space mass metric.
  SpMat a_scalar = (1.0 / 12.0) *
                   SpMat(op_->scalar_op().transpose() * op_->mass() *
                         op_->scalar_op());

  // Edge penalties, assembled on the scalar space.
  const EdgeQuadratureRule erule = edge_quadrature(params_.edge_order);
  std::vector<Eigen::Triplet<double>> trips;
  for (int ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& ed = mesh.edges[ei];
    if (ed.elem_minus < 0) continue;
    const int elems[2] = {ed.elem_plus, ed.elem_minus};
    Eigen::Matrix<double, 12, 12> local =
        Eigen::Matrix<double, 12, 12>::Zero();
    const double w0 = params_.gamma0 / (ed.h * ed.h * ed.h);
    const double w1 = ed.tag == EdgeTag::Fold ? 0.0 : params_.gamma1 / ed.h;
    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      const double u = erule.points[q];
      const EdgePoint ep = mesh.edge_point(ei, u);
      const double wj = erule.weights[q] * ep.jac;
      double tr[2][6];
      Vec2 gr[2][6];
      for (int s = 0; s < 2; ++s) {
        const Vec2 ref = mesh.edge_ref_point(ei, s, u);
        const auto phi = p2_shape(ref);
        const Grad6 dphi = p2_grad(ref);
        const Mat2 Kinv = mesh.map_data(elems[s], ref).J.inverse();
        for (int a = 0; a < 6; ++a) {
          tr[s][a] = phi[a];
          gr[s][a] = Kinv.transpose() * dphi.row(a).transpose();
        }
      }
      for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 6; ++a) {
          const double sa = s == 0 ? 1.0 : -1.0;
          for (int s2 = 0; s2 < 2; ++s2)
            for (int b = 0; b < 6; ++b) {
              const double sb = s2 == 0 ? 1.0 : -1.0;
              double v = w0 * tr[s][a] * tr[s2][b];
              if (w1 != 0.0) v += w1 * gr[s][a].dot(gr[s2][b]);
              local(6 * s + a, 6 * s2 + b) += wj * sa * sb * v;
            }
        }
    }
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 6; ++a)
        for (int s2 = 0; s2 < 2; ++s2)
          for (int b = 0; b < 6; ++b)
            trips.emplace_back(6 * elems[s] + a, 6 * elems[s2] + b,
                               local(6 * s + a, 6 * s2 + b));
  }
  SpMat penalties(6 * ne, 6 * ne);
  penalties.setFromTriplets(trips.begin(), trips.end());
  a_scalar += penalties;

  A_ = expand_to_vector(a_scalar);
  b_ = Eigen::VectorXd::Zero(18 * ne);
  c_ = 0.0;

  // Point pins: every element-local trace at the pinned vertex.
  for (const DirichletPoint& d : bc_) {
    const double w = params_.gamma2 / (d.h * d.h);
    for (int e = 0; e < ne; ++e)
      for (int a = 0; a < 6; ++a) {
        if (mesh.elements[e].nodes[a] != d.vertex) continue;
        for (int c = 0; c < 3; ++c) {
          const int i = DGField::dof(e, a, c);
          A_.coeffRef(i, i) += w;
          b_[i] += w * d.target[c];
          c_ += 0.5 * w * d.target[c] * d.target[c];
        }
      }
  }
  A_.makeCompressed();
}

EnergyBreakdown EnergyModel::energy(const DGField& field) const {
  const FoldMesh& mesh = op_->mesh();
  EnergyBreakdown out;

  const HessianField h = op_->apply(field);
  const QuadratureRule rule = ref_quadrature(params_.quad_order);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      out.bending += rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ *
                     h.frob_sq(e, rule.points[q]);
  out.bending /= 24.0;

  const EdgeQuadratureRule erule = edge_quadrature(params_.edge_order);
  for (int ei = 0; ei < mesh.num_edges(); ++ei) {
    const Edge& ed = mesh.edges[ei];
    if (ed.elem_minus < 0) continue;
    double vj = 0.0, gj = 0.0;
    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      const double u = erule.points[q];
      const JumpAvg ja = eval_jump_avg(field, ei, u);
      const double wj = erule.weights[q] * mesh.edge_point(ei, u).jac;
      vj += wj * ja.value_jump.squaredNorm();
      if (ed.tag != EdgeTag::Fold) gj += wj * ja.grad_jump.squaredNorm();
    }
    out.jump0 += 0.5 * params_.gamma0 * vj / (ed.h * ed.h * ed.h);
    out.jump1 += 0.5 * params_.gamma1 * gj / ed.h;
  }

  for (const DirichletPoint& d : bc_) {
    const double w = 0.5 * params_.gamma2 / (d.h * d.h);
    for (int e = 0; e < mesh.num_elements(); ++e)
      for (int a = 0; a < 6; ++a) {
        if (mesh.elements[e].nodes[a] != d.vertex) continue;
        Vec3 v;
        for (int c = 0; c < 3; ++c) v[c] = field.coeffs[DGField::dof(e, a, c)];
        out.dirichlet += w * (v - d.target).squaredNorm();
      }
  }

  out.total = out.bending + out.jump0 + out.jump1 + out.dirichlet;
  return out;
}

double EnergyModel::quadratic_value(const Eigen::VectorXd& y) const {
  return 0.5 * y.dot(A_ * y) - b_.dot(y) + c_;
}

EnergyBreakdown energy(const DGField& field, const EnergyParams& params,
                       const std::vector<DirichletPoint>& bc) {
  return EnergyModel(*field.mesh, params, bc).energy(field);
}

std::tuple<SpMat, Eigen::VectorXd, double> assemble_quadratic_form(
    const FoldMesh& mesh, const EnergyParams& params,
    const std::vector<DirichletPoint>& bc) {
  EnergyModel model(mesh, params, bc);
  return {model.matrix(), model.rhs(), model.constant()};
}

IsometryReport isometry_violation(const DGField& field, int quad_order) {
  const FoldMesh& mesh = *field.mesh;
  const QuadratureRule rule = ref_quadrature(quad_order);
  IsometryReport rep;
  rep.defects.resize(mesh.num_elements(), Mat2::Zero());
  rep.norms.resize(mesh.num_elements(), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Mat2 acc = Mat2::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Mat32 g = field.gradient(e, rule.points[q]);
      const double w = rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
      acc += w * (g.transpose() * g - Mat2::Identity());
    }
    rep.defects[e] = acc;
    rep.norms[e] = acc.norm();
    rep.total += rep.norms[e];
  }
  return rep;
}

double isometry_defect_l2(const DGField& field, int quad_order) {
  const FoldMesh& mesh = *field.mesh;
  const QuadratureRule rule = ref_quadrature(quad_order);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Mat32 g = field.gradient(e, rule.points[q]);
      const double w = rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
      total += 0.5 * w * (g.transpose() * g - Mat2::Identity()).squaredNorm();
    }
  return total;
}

Eigen::VectorXd stretch_gradient(const DGField& field, int quad_order) {
  const FoldMesh& mesh = *field.mesh;
  const QuadratureRule rule = ref_quadrature(quad_order);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(field.coeffs.size());
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const MapData md = mesh.map_data(e, rule.points[q]);
      const Mat2 Kinv = md.J.inverse();
      const Grad6 dphi = p2_grad(rule.points[q]);
      const Mat32 G = field.gradient(e, rule.points[q]);
      const Mat2 D = G.transpose() * G - Mat2::Identity();
      const Mat32 GD = G * D;  // D is symmetric
      const double w = rule.weights[q] * md.detJ;
      for (int b = 0; b < 6; ++b) {
        const Vec2 gb = Kinv.transpose() * dphi.row(b).transpose();
        for (int c = 0; c < 3; ++c)
          g[DGField::dof(e, b, c)] += w * 2.0 * GD.row(c).dot(gb);
      }
    }
  return g;
}

std::vector<double> elementwise_curvature(const HessianField& h,
                                          int quad_order) {
  const FoldMesh& mesh = *h.mesh;
  const QuadratureRule rule = ref_quadrature(quad_order);
  std::vector<double> out(mesh.num_elements(), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double num = 0.0, area = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
      num += w * h.frob_sq(e, rule.points[q]);
      area += w;
    }
    out[e] = std::sqrt(num / area);
  }
  return out;
}

std::vector<double> elementwise_curvature(const HessianOperator& op,
                                          const DGField& field) {
  return elementwise_curvature(op.apply(field), op.quad_order());
}

}  // namespace foldsim
