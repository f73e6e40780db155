#pragma once

#include <memory>
#include <tuple>

#include "foldsim/hessian.hpp"

namespace foldsim {

struct EnergyParams {
  double gamma0 = 1.0;  // value-jump penalty weight
  double gamma1 = 1.0;  // gradient-jump penalty weight
  double gamma2 = 1.0;  // point-pin penalty weight
  int quad_order = 6;
  int edge_order = 6;
};

struct EnergyBreakdown {
  double bending = 0.0;    // 1/24 of the squared reconstructed Hessian
  double jump0 = 0.0;      // gamma0/2 * h^-3-weighted squared value jumps
  double jump1 = 0.0;      // gamma1/2 * h^-1-weighted squared gradient jumps
  double dirichlet = 0.0;  // gamma2/2 * h^-2-weighted squared pin mismatches
  double total = 0.0;
};

struct IsometryReport {
  std::vector<Mat2> defects;   // per element: integral of (G^T G - I)
  std::vector<double> norms;   // Frobenius norms of the defects
  double total = 0.0;          // sum of the norms
};

// Bending energy with interior-penalty stabilization and point pins, held
// both as a quadrature evaluator and as the assembled quadratic form
//   E(y) = 0.5 y'Ay - b'y + c.
// Every element-local trace at a pinned vertex is penalized.
class EnergyModel {
 public:
  EnergyModel(const FoldMesh& mesh, const EnergyParams& params,
              const std::vector<DirichletPoint>& bc);
  EnergyModel(std::shared_ptr<const HessianOperator> op,
              const EnergyParams& params,
              const std::vector<DirichletPoint>& bc);

  const FoldMesh& mesh() const { return op_->mesh(); }
  const EnergyParams& params() const { return params_; }
  const std::vector<DirichletPoint>& bc() const { return bc_; }
  const HessianOperator& hessian_op() const { return *op_; }

  const SpMat& matrix() const { return A_; }
  const Eigen::VectorXd& rhs() const { return b_; }
  double constant() const { return c_; }

  // Term-by-term quadrature evaluation with the same rules as the assembly.
  EnergyBreakdown energy(const DGField& field) const;
  double quadratic_value(const Eigen::VectorXd& y) const;

 private:
  void assemble();

  std::shared_ptr<const HessianOperator> op_;
  EnergyParams params_;
  std::vector<DirichletPoint> bc_;
  SpMat A_;
  Eigen::VectorXd b_;
  double c_ = 0.0;
};

EnergyBreakdown energy(const DGField& field, const EnergyParams& params,
                       const std::vector<DirichletPoint>& bc);

std::tuple<SpMat, Eigen::VectorXd, double> assemble_quadratic_form(
    const FoldMesh& mesh, const EnergyParams& params,
    const std::vector<DirichletPoint>& bc);

// Elementwise integrals of G^T G - I for the deformation gradient G.
IsometryReport isometry_violation(const DGField& field, int quad_order = 6);

// Half the squared L2 norm of the pointwise defect G^T G - I.
double isometry_defect_l2(const DGField& field, int quad_order = 6);

// Gradient of isometry_defect_l2 with respect to the field coefficients.
Eigen::VectorXd stretch_gradient(const DGField& field, int quad_order = 6);

// Per-element root-mean-square Frobenius density of a reconstructed Hessian.
std::vector<double> elementwise_curvature(const HessianField& h,
                                          int quad_order = 6);
std::vector<double> elementwise_curvature(const HessianOperator& op,
                                          const DGField& field);

}  // namespace foldsim
