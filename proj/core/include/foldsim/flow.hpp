#pragma once

#include <memory>

#include "foldsim/energy.hpp"

namespace foldsim {

struct FlowConfig {
  double tau = 0.01;        // pseudo-time step
  double eps_stop = 0.01;   // stop when |dE|/tau falls below this
  double eps_pp = 1.0;      // preprocessing target for the stretch functional
  double rho_tilde = 1.0;   // admissibility threshold on the initial violation
  double alpha_energy = 1.0;  // weight of the energy form in the step metric
  double alpha_mass = 1.0;    // weight of the L2 mass in the step metric
  int max_iters = 2000;
  int pp_max_iters = 5000;
  double pp_step0 = 1.0;     // initial line-search step
  double pp_armijo = 1e-4;   // sufficient-decrease constant
  double pp_backtrack = 0.5;
  // Out-of-plane seed after the linear stage, relative to the largest pin
  // displacement; planar states are otherwise stationary for the flow.
  double pp_perturb = 0.25;
};

enum class FlowTermination { AlreadyStationary, Stationary, MaxIters };
enum class PpTermination { Converged, PpMaxIters };

struct FlowStep {
  DGField y_next;
  double step_norm = 0.0;        // metric norm of the rate d
  Eigen::VectorXd multipliers;   // one per constraint row
  Eigen::VectorXd d;             // y_next = y_prev + tau * d
};

struct FlowReport {
  std::vector<EnergyBreakdown> energies;  // size iterations + 1
  std::vector<double> step_norms;         // size iterations
  std::vector<double> violations;         // size iterations + 1
  std::vector<double> grad_rate_sq;       // |grad d|^2 per step
  double eps0 = 0.0;    // initial isometry violation
  double c_star = 0.0;  // max over steps of |grad d|^2 / step_norm^2
  int iterations = 0;
  FlowTermination termination = FlowTermination::Stationary;
};

struct PpReport {
  int descent_steps = 0;
  double defect_initial = 0.0;  // stretch functional after the linear stage
  double defect_final = 0.0;
  PpTermination termination = PpTermination::Converged;
};

// Constrained gradient flow of the discrete bending energy: each step solves
//   [ M* + tau A   B' ] [ d      ]   [ b - A y ]
//   [ B            0  ] [ lambda ] = [ 0       ]
// with M* = alpha_energy * A + alpha_mass * M, and advances y by tau * d.
// B carries the linearized elementwise isometry constraints, so every step
// preserves the element integrals of G^T G to first order exactly.
class FlowSystem {
 public:
  FlowSystem(const FoldMesh& mesh, const EnergyParams& params,
             const std::vector<DirichletPoint>& bc, const FlowConfig& cfg);
  ~FlowSystem();

  const EnergyModel& model() const { return model_; }
  const FlowConfig& config() const { return cfg_; }
  const FoldMesh& mesh() const { return model_.mesh(); }

  // Linearized isometry rows, 3 per element in the order (11), (22), (12).
  SpMat constraint_matrix(const DGField& y) const;

  FlowStep flow_step(const DGField& y_prev) const;
  // The observer, when given, sees the initial state (iteration 0) and every
  // accepted iterate.
  std::pair<DGField, FlowReport> run_flow(
      const DGField& y0,
      const std::function<void(int, const DGField&)>& observer = {}) const;

  // Initial iterate: linear bending solve anchored at the flat reference,
  // an out-of-plane seed, then line-search descent on the stretch functional
  // until it falls below eps_pp.
  std::pair<DGField, PpReport> preprocess() const;

 private:
  struct StepSolver;

  FlowConfig cfg_;
  EnergyModel model_;
  SpMat mass_;    // vector-valued L2 mass
  SpMat metric_;  // alpha_energy * A + alpha_mass * mass
  // Reused across steps: the constraint pattern is fixed, so the symbolic
  // factorization of the reduced system survives the whole flow.
  mutable std::unique_ptr<StepSolver> step_solver_;
};

// Pin at the corner vertex nearest to the locator (must match within
// 1e-6 of the mesh diameter).
DirichletPoint make_pin(const FoldMesh& mesh, const Vec2& locator,
                        const Vec3& target);

// Two-point compression data: each point moves the fraction s/2 toward the
// other, staying in the plane of the sheet.
std::vector<DirichletPoint> compression_bc(const FoldMesh& mesh, double s,
                                           const Vec2& xd, const Vec2& xd2);

}  // namespace foldsim
