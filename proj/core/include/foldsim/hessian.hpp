#pragma once

#include "foldsim/dgspace.hpp"

namespace foldsim {

// Matrix-valued elementwise quadratic field holding a reconstructed Hessian:
// three components, each a symmetric-in-content (but stored full) 2x2 matrix
// per point. Layout: dof(elem, comp, node, entry) with entry m = 2*i + j.
struct HessianField {
  const FoldMesh* mesh = nullptr;
  Eigen::VectorXd coeffs;

  static int dof(int elem, int comp, int node, int entry) {
    return 72 * elem + 24 * comp + 4 * node + entry;
  }

  Mat2 eval(int elem, int comp, const Vec2& ref) const;
  // Squared Frobenius norm over all three components at a point.
  double frob_sq(int elem, const Vec2& ref) const;
};

// Lifting of edge data into the one or two elements forming the edge patch.
// coef[slot][a] is the 2x2 coefficient of local shape function a on
// elems[slot]; slot 0 is the plus element.
struct PatchMatrixField {
  int edge = -1;
  std::array<int, 2> elems{-1, -1};
  std::array<std::array<Mat2, 6>, 2> coef{};

  Mat2 eval(int slot, const Vec2& ref) const;
};

// Physical second derivatives of the six shape functions at a reference
// point, including the curved-map correction (inverse-map curvature).
std::array<Mat2, 6> shape_physical_hessians(const FoldMesh& mesh, int elem,
                                            const Vec2& ref);
// Pointwise physical Hessian of each component of a field.
std::array<Mat2, 3> pointwise_hessian(const DGField& field, int elem,
                                      const Vec2& ref);

// Value-jump lifting s_e: the matrix field on the edge patch defined by
// testing against elementwise quadratic matrix fields,
//   integral over patch of s_e : phi  =  integral over e of
//   vhat * average(div phi) . normal.
// Fold edges participate; boundary edges are rejected.
PatchMatrixField lift_value_jump(const FoldMesh& mesh, int edge,
                                 const std::function<double(double)>& vhat,
                                 int quad_order = 6);

// Gradient-jump lifting r_e, defined by
//   integral over patch of r_e : phi  =  integral over e of
//   what . average(phi) * normal.
// Fold edges are excluded (folding stays free); boundary edges rejected.
PatchMatrixField lift_gradient_jump(const FoldMesh& mesh, int edge,
                                    const std::function<Vec2(double)>& what,
                                    int quad_order = 6);

// Reconstruction operator mapping a deformation field to its discrete
// Hessian: the elementwise projected second derivative, plus value-jump
// liftings over all interior edges, minus gradient-jump liftings over the
// interior edges that are not folds.
class HessianOperator {
 public:
  explicit HessianOperator(const FoldMesh& mesh, int quad_order = 6,
                           int edge_order = 6);

  const FoldMesh& mesh() const { return *mesh_; }
  // Scalar operator: (24 per element) x (6 per element).
  const SpMat& scalar_op() const { return op_; }
  // Mass matrix of the scalar Hessian space (block diagonal, 24 per element).
  const SpMat& mass() const { return mass_; }
  int quad_order() const { return quad_order_; }

  HessianField apply(const DGField& field) const;

 private:
  const FoldMesh* mesh_;
  int quad_order_;
  SpMat op_;
  SpMat mass_;
};

HessianField discrete_hessian(const HessianOperator& op, const DGField& field);

// Squared broken second-order seminorm: elementwise |pointwise Hessian|^2,
// plus h^-3-weighted squared value jumps over interior edges, plus
// h^-1-weighted squared gradient jumps over non-fold interior edges.
double h2_seminorm(const DGField& field, int quad_order = 6);

}  // namespace foldsim
