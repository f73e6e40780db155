#include "foldsim/flow.hpp"

#ifdef FOLDSIM_WITH_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace foldsim {

// Null-space step solve: the constraint rows are element-local (3 x 18
// blocks), so an orthonormal basis Z of ker B is block diagonal and the
// constrained stationarity system collapses to the SPD reduced form
// Z^T K Z w = Z^T r with d = Z w satisfying B d = 0 to roundoff. The
// pattern of Z^T K Z never changes, so the symbolic factorization is done
// once per flow.
struct FlowSystem::StepSolver {
  SpMat K;  // metric + tau * A, fixed along the flow
  SpMat Z;
  SpMat C;
#ifdef FOLDSIM_WITH_CHOLMOD
  Eigen::CholmodSupernodalLLT<SpMat> llt;
#else
  Eigen::SimplicialLLT<SpMat> llt;
#endif
  bool analyzed = false;

  explicit StepSolver(SpMat k) : K(std::move(k)) { K.makeCompressed(); }

  void factor(const SpMat& B) {
    const int ne = static_cast<int>(B.rows()) / 3;
    std::vector<Eigen::Triplet<double>> zt;
    zt.reserve(static_cast<std::size_t>(ne) * 18 * 15);
    for (int e = 0; e < ne; ++e) {
      Eigen::Matrix<double, 18, 3> Bt;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 18; ++c) Bt(c, r) = B.coeff(3 * e + r, 18 * e + c);
      const Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 18, 3>> qr(Bt);
      const Eigen::Matrix<double, 18, 18> Q = qr.householderQ();
      for (int c = 0; c < 15; ++c)
        for (int r = 0; r < 18; ++r)
          zt.emplace_back(18 * e + r, 15 * e + c, Q(r, 3 + c));
    }
    Z.resize(K.rows(), 15 * ne);
    Z.setFromTriplets(zt.begin(), zt.end());

    C = Z.transpose() * K * Z;
    C.makeCompressed();
    if (!analyzed) {
      llt.analyzePattern(C);
      analyzed = true;
    }
    llt.factorize(C);
    if (llt.info() != Eigen::Success)
      throw SolveFailure("step-metric factorization failed");
  }

  // Returns d with B d = 0; refines against the reduced system.
  Eigen::VectorXd solve(const Eigen::VectorXd& r) const {
    const Eigen::VectorXd rz = Z.transpose() * r;
    Eigen::VectorXd w = llt.solve(rz);
    const double scale = rz.norm();
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_w = w;
    for (int it = 0; it < 10; ++it) {
      const Eigen::VectorXd res = rz - C * w;
      const double rn = res.norm();
      if (rn < best) {
        best = rn;
        best_w = w;
      }
      if (rn <= 1e-13 * scale) break;
      const Eigen::VectorXd dw = llt.solve(res);
      if (!dw.allFinite()) break;
      w += dw;
    }
    if (scale > 0.0 && best > 1e-10 * scale)
      throw SolveFailure("step solve stalled at residual " +
                         std::to_string(best / scale) + " relative");
    return Z * best_w;
  }
};

FlowSystem::~FlowSystem() = default;

FlowSystem::FlowSystem(const FoldMesh& mesh, const EnergyParams& params,
                       const std::vector<DirichletPoint>& bc,
                       const FlowConfig& cfg)
    : cfg_(cfg),
      model_(mesh, params, bc),
      mass_(assemble_l2_mass(mesh, params.quad_order)) {
  metric_ = cfg_.alpha_energy * model_.matrix() + cfg_.alpha_mass * mass_;
}

SpMat FlowSystem::constraint_matrix(const DGField& y) const {
  const FoldMesh& mesh = model_.mesh();
  const QuadratureRule rule = ref_quadrature(model_.params().quad_order);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.num_elements() * 3 * 18);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::Matrix<double, 3, 18> local = Eigen::Matrix<double, 3, 18>::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const MapData md = mesh.map_data(e, rule.points[q]);
      const Mat2 Kinv = md.J.inverse();
      const Grad6 dphi = p2_grad(rule.points[q]);
      const Mat32 g = y.gradient(e, rule.points[q]);
      const double w = rule.weights[q] * md.detJ;
      for (int b = 0; b < 6; ++b) {
        const Vec2 gb = Kinv.transpose() * dphi.row(b).transpose();
        for (int c = 0; c < 3; ++c) {
          const int col = 3 * b + c;
          local(0, col) += w * 2.0 * g(c, 0) * gb[0];
          local(1, col) += w * 2.0 * g(c, 1) * gb[1];
          local(2, col) += w * (g(c, 0) * gb[1] + g(c, 1) * gb[0]);
        }
      }
    }
    for (int k = 0; k < 3; ++k)
      for (int col = 0; col < 18; ++col)
        trips.emplace_back(3 * e + k, 18 * e + col, local(k, col));
  }
  SpMat out(3 * mesh.num_elements(), 18 * mesh.num_elements());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

FlowStep FlowSystem::flow_step(const DGField& y_prev) const {
  const int n = static_cast<int>(y_prev.coeffs.size());
  const SpMat B = constraint_matrix(y_prev);
  const int m = static_cast<int>(B.rows());

  const Eigen::VectorXd r = model_.rhs() - model_.matrix() * y_prev.coeffs;
  FlowStep out;
  out.y_next = y_prev;
  out.multipliers = Eigen::VectorXd::Zero(m);
  out.d = Eigen::VectorXd::Zero(n);
  if (r.norm() == 0.0) return out;

  if (!step_solver_)
    step_solver_ =
        std::make_unique<StepSolver>(metric_ + cfg_.tau * model_.matrix());
  step_solver_->factor(B);
  out.d = step_solver_->solve(r);

  const double brel = (B * out.d).norm();
  const double bscale = B.norm() * out.d.norm();
  if (bscale > 0.0 && brel > 1e-9 * bscale)
    throw SolveFailure("constraint residual " + std::to_string(brel / bscale) +
                       " relative after the step solve");

  // Multipliers from per-element stationarity: B_e B_e^T lam_e = B_e (r - K d).
  const Eigen::VectorXd resid = r - step_solver_->K * out.d;
  for (int e = 0; e < m / 3; ++e) {
    Eigen::Matrix<double, 3, 18> Be;
    for (int rr = 0; rr < 3; ++rr)
      for (int c = 0; c < 18; ++c)
        Be(rr, c) = B.coeff(3 * e + rr, 18 * e + c);
    const Eigen::Vector3d rhs_e = Be * resid.segment<18>(18 * e);
    out.multipliers.segment<3>(3 * e) =
        (Be * Be.transpose())
            .completeOrthogonalDecomposition()
            .solve(rhs_e);
  }

  out.y_next.coeffs = y_prev.coeffs + cfg_.tau * out.d;
  out.step_norm = std::sqrt(std::max(0.0, out.d.dot(metric_ * out.d)));
  return out;
}

std::pair<DGField, FlowReport> FlowSystem::run_flow(
    const DGField& y0,
    const std::function<void(int, const DGField&)>& observer) const {
  const FoldMesh& mesh = model_.mesh();
  const int quad_order = model_.params().quad_order;
  FlowReport rep;

  IsometryReport viol = isometry_violation(y0, quad_order);
  rep.eps0 = viol.total;
  if (viol.total > cfg_.rho_tilde)
    throw AdmissibilityError("initial isometry violation " +
                             std::to_string(viol.total) +
                             " exceeds the admissibility threshold " +
                             std::to_string(cfg_.rho_tilde));

  DGField y = y0;
  EnergyBreakdown ebd = model_.energy(y);
  rep.energies.push_back(ebd);
  rep.violations.push_back(viol.total);
  if (observer) observer(0, y);

  const double e0 = ebd.total;
  const double einv_tol = 1e-10 * (1.0 + std::abs(e0));
  const double y0_scale = 1.0 + y0.coeffs.norm();

  // Element defects accumulate exactly along the flow (same quadrature as
  // the constraints); track them to verify the telescoping identity.
  std::vector<Mat2> base = isometry_violation(y0, quad_order).defects;
  std::vector<Mat2> acc(mesh.num_elements(), Mat2::Zero());
  const QuadratureRule rule = ref_quadrature(quad_order);

  rep.termination = FlowTermination::MaxIters;
  for (int k = 1; k <= cfg_.max_iters; ++k) {
    const FlowStep step = flow_step(y);
    // A step whose entire energy gain (tau * |d|_M^2, by the decay identity)
    // sits below the rounding floor of the energy is no step at all.
    if (cfg_.tau * step.step_norm * step.step_norm <= einv_tol) {
      rep.termination = k == 1 ? FlowTermination::AlreadyStationary
                               : FlowTermination::Stationary;
      break;
    }

    const double e_prev = rep.energies.back().total;
    const EnergyBreakdown e_next = model_.energy(step.y_next);

    // Exact decay identity of the constrained step.
    const double decay_lhs = e_next.total + cfg_.tau * step.step_norm * step.step_norm +
                             0.5 * cfg_.tau * cfg_.tau *
                                 step.d.dot(model_.matrix() * step.d);
    if (std::abs(decay_lhs - e_prev) > 1e-9 * (1.0 + std::abs(e0)))
      throw InvariantBreach("energy decay identity violated at step " +
                            std::to_string(k) + ": mismatch " +
                            std::to_string(std::abs(decay_lhs - e_prev)));
    if (e_next.total > e_prev + einv_tol)
      throw InvariantBreach("energy increased at step " + std::to_string(k));

    // Per-element defect telescoping.
    DGField dfield = y;
    dfield.coeffs = step.d;
    double grad_sq = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      Mat2 g2 = Mat2::Zero();
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Mat32 g = dfield.gradient(e, rule.points[q]);
        const double w =
            rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
        g2 += w * (g.transpose() * g);
      }
      acc[e] += cfg_.tau * cfg_.tau * g2;
      grad_sq += g2.trace();
    }

    y = step.y_next;
    viol = isometry_violation(y, quad_order);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const Mat2 expect = base[e] + acc[e];
      if ((viol.defects[e] - expect).norm() > 1e-8 * y0_scale)
        throw InvariantBreach("elementwise defect telescoping failed at step " +
                              std::to_string(k) + ", element " +
                              std::to_string(e));
    }

    rep.energies.push_back(e_next);
    rep.violations.push_back(viol.total);
    rep.step_norms.push_back(step.step_norm);
    rep.grad_rate_sq.push_back(grad_sq);
    rep.iterations = k;
    if (observer) observer(k, y);
    if (step.step_norm > 0.0)
      rep.c_star = std::max(rep.c_star,
                            grad_sq / (step.step_norm * step.step_norm));

    if (std::abs(e_next.total - e_prev) / cfg_.tau <= cfg_.eps_stop) {
      rep.termination = FlowTermination::Stationary;
      break;
    }
  }

  // A-posteriori admissibility: the final violation stays within the initial
  // one plus the accumulated squared gradient rates.
  double budget = rep.eps0;
  for (double g : rep.grad_rate_sq) budget += cfg_.tau * cfg_.tau * g;
  if (rep.violations.back() > budget + 1e-8 * (1.0 + budget))
    throw InvariantBreach("violation bound exceeded: " +
                          std::to_string(rep.violations.back()) + " > " +
                          std::to_string(budget));

  return {y, rep};
}

std::pair<DGField, PpReport> FlowSystem::preprocess() const {
  const FoldMesh& mesh = model_.mesh();
  const int n = 18 * mesh.num_elements();
  PpReport rep;

  // Flat reference embedding used to anchor the singular linear stage.
  const DGField ref = interpolate(
      mesh, [](const Vec2& x) { return Vec3(x.x(), x.y(), 0.0); });

  const SpMat& A = model_.matrix();
  double tra = 0.0, trm = 0.0;
  for (int i = 0; i < n; ++i) {
    tra += A.coeff(i, i);
    trm += mass_.coeff(i, i);
  }
  const double delta = 1e-8 * (tra / trm);
  SpMat reg = A + delta * mass_;
  reg.makeCompressed();
  Eigen::SimplicialLDLT<SpMat> ldlt(reg);
  if (ldlt.info() != Eigen::Success)
    throw SolveFailure("linear stage factorization failed");
  const Eigen::VectorXd rhs = model_.rhs() + delta * (mass_ * ref.coeffs);
  DGField y = zero_field(mesh);
  y.coeffs = ldlt.solve(rhs);
  if ((reg * y.coeffs - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
    throw SolveFailure("linear stage residual too large");

  // Out-of-plane seed proportional to the strongest pin displacement;
  // without it, planar data keeps the whole evolution planar.
  double pin_move = 0.0;
  for (const DirichletPoint& d : model_.bc()) {
    const Vec2& x = mesh.nodes[d.vertex];
    pin_move = std::max(pin_move,
                        (d.target - Vec3(x.x(), x.y(), 0.0)).norm());
  }
  if (pin_move > 0.0 && cfg_.pp_perturb > 0.0) {
    const double amp = cfg_.pp_perturb * pin_move;
    std::vector<std::pair<Vec2, Vec2>> creases;
    for (const Edge& ed : mesh.edges)
      if (ed.tag == EdgeTag::Fold)
        creases.emplace_back(mesh.nodes[ed.n0], mesh.nodes[ed.n1]);
    if (!creases.empty()) {
      // Tent ridge over the fold lines: the crease is the one direction the
      // energy does not resist, so the descent buckles into the fold instead
      // of against it.
      const auto crease_dist = [&creases](const Vec2& p) {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& [a, b] : creases) {
          const Vec2 ab = b - a;
          const double t =
              std::clamp(ab.dot(p - a) / ab.squaredNorm(), 0.0, 1.0);
          dmin = std::min(dmin, (p - (a + t * ab)).norm());
        }
        return dmin;
      };
      double dmax = 0.0;
      for (const Vec2& p : mesh.nodes) dmax = std::max(dmax, crease_dist(p));
      for (int e = 0; e < mesh.num_elements(); ++e)
        for (int a = 0; a < 6; ++a) {
          const Vec2& p = mesh.nodes[mesh.elements[e].nodes[a]];
          y.coeffs[DGField::dof(e, a, 2)] +=
              amp * (1.0 - crease_dist(p) / dmax);
        }
    } else {
      Vec2 lo(std::numeric_limits<double>::max(),
              std::numeric_limits<double>::max());
      Vec2 hi = -lo;
      for (const Vec2& p : mesh.nodes) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      const Vec2 span = hi - lo;
      for (int e = 0; e < mesh.num_elements(); ++e)
        for (int a = 0; a < 6; ++a) {
          const Vec2& p = mesh.nodes[mesh.elements[e].nodes[a]];
          const double bump = std::sin(M_PI * (p.x() - lo.x()) / span.x()) *
                              std::sin(M_PI * (p.y() - lo.y()) / span.y());
          y.coeffs[DGField::dof(e, a, 2)] += amp * bump;
        }
    }
  }

  // Line-search descent on the stretch functional.
  const int quad_order = model_.params().quad_order;
  double j = isometry_defect_l2(y, quad_order);
  rep.defect_initial = j;
  rep.termination = PpTermination::Converged;
  int it = 0;
  while (j > cfg_.eps_pp) {
    if (it >= cfg_.pp_max_iters) {
      rep.termination = PpTermination::PpMaxIters;
      break;
    }
    const Eigen::VectorXd g = stretch_gradient(y, quad_order);
    const double g2 = g.squaredNorm();
    if (g2 <= 1e-28) {
      rep.termination = PpTermination::PpMaxIters;
      break;
    }
    double alpha = cfg_.pp_step0;
    DGField trial = y;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial.coeffs = y.coeffs - alpha * g;
      const double jt = isometry_defect_l2(trial, quad_order);
      if (jt <= j - cfg_.pp_armijo * alpha * g2) {
        y = trial;
        j = jt;
        accepted = true;
        break;
      }
      alpha *= cfg_.pp_backtrack;
    }
    ++it;
    if (!accepted) {
      rep.termination = PpTermination::PpMaxIters;
      break;
    }
  }
  rep.descent_steps = it;
  rep.defect_final = j;
  return {y, rep};
}

DirichletPoint make_pin(const FoldMesh& mesh, const Vec2& locator,
                        const Vec3& target) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.num_nodes(); ++v) {
    if (!mesh.is_corner[v]) continue;
    const double d = (mesh.nodes[v] - locator).norm();
    if (d < bd) {
      bd = d;
      best = v;
    }
  }
  if (best < 0 || bd > 1e-6 * mesh.diameter())
    throw MeshError("no corner vertex at (" + std::to_string(locator.x()) +
                    ", " + std::to_string(locator.y()) + ")");
  DirichletPoint d;
  d.vertex = best;
  d.target = target;
  double sum = 0.0;
  int count = 0;
  for (const Edge& e : mesh.edges)
    if (e.n0 == best || e.n1 == best) {
      sum += e.h;
      ++count;
    }
  d.h = count > 0 ? sum / count : 0.0;
  return d;
}

std::vector<DirichletPoint> compression_bc(const FoldMesh& mesh, double s,
                                           const Vec2& xd, const Vec2& xd2) {
  if (s < 0.0 || s > 1.0)
    throw ConfigError("compression fraction must lie in [0, 1]");
  const Vec2 g1 = xd + 0.5 * s * (xd2 - xd);
  const Vec2 g2 = xd2 + 0.5 * s * (xd - xd2);
  return {make_pin(mesh, xd, Vec3(g1.x(), g1.y(), 0.0)),
          make_pin(mesh, xd2, Vec3(g2.x(), g2.y(), 0.0))};
}

}  // namespace foldsim
