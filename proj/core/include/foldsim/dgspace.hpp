#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "foldsim/mesh.hpp"

namespace foldsim {

using SpMat = Eigen::SparseMatrix<double>;

// Elementwise quadratic vector field with no continuity between elements.
// Coefficient layout: dof(elem, node, comp) = 18*elem + 3*node + comp, so a
// scalar sub-field of component c occupies every third entry.
struct DGField {
  const FoldMesh* mesh = nullptr;
  Eigen::VectorXd coeffs;

  static int dof(int elem, int node, int comp) {
    return 18 * elem + 3 * node + comp;
  }

  Vec3 value(int elem, const Vec2& ref) const;
  // Physical gradient: rows are components, columns are space directions.
  Mat32 gradient(int elem, const Vec2& ref) const;

  // 6x3 coefficient block of one element (rows nodes, columns components).
  Eigen::Matrix<double, 6, 3> block(int elem) const;
  void set_block(int elem, const Eigen::Matrix<double, 6, 3>& b);
};

DGField zero_field(const FoldMesh& mesh);

// Nodal interpolant: coefficients are f at the element's own node positions
// (corner or midpoint), evaluated per element.
DGField interpolate(const FoldMesh& mesh,
                    const std::function<Vec3(const Vec2&)>& f);

struct JumpAvg {
  Vec3 value_jump = Vec3::Zero();
  Vec3 value_avg = Vec3::Zero();
  Mat32 grad_jump = Mat32::Zero();
  Mat32 grad_avg = Mat32::Zero();
};

// Two-sided traces at fraction s along an interior edge (plus minus minus,
// and their average). Throws NotInterior on boundary edges.
JumpAvg eval_jump_avg(const DGField& field, int edge, double s);

// Block-diagonal L2 mass of the vector-valued space (18x18 per element).
SpMat assemble_l2_mass(const FoldMesh& mesh, int quad_order = 6);
// Scalar variant (6x6 per element).
SpMat assemble_l2_mass_scalar(const FoldMesh& mesh, int quad_order = 6);
// Scalar stiffness: elementwise integral of grad(u).grad(v).
SpMat assemble_grad_gram_scalar(const FoldMesh& mesh, int quad_order = 6);

// Expand a scalar-space operator (6 dofs/element) to act identically on each
// of the three components of the vector space (18 dofs/element).
SpMat expand_to_vector(const SpMat& scalar_op);

// Per-element integrals of |grad u|^2 and their sum.
std::pair<std::vector<double>, double> elementwise_gradient_norms(
    const DGField& field, int quad_order = 6);

}  // namespace foldsim
