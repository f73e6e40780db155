#include "foldsim/driver.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace foldsim {

FoldMesh build_domain(const RunConfig& cfg) {
  FoldMesh mesh;
  if (!cfg.domain.mesh_file.empty()) {
    mesh = load_mesh(cfg.domain.mesh_file);
  } else {
    mesh = build_rect_mesh(*cfg.domain.width, *cfg.domain.height,
                           *cfg.domain.target_h);
  }
  if (cfg.curve) {
    const FoldCurve curve = cfg.curve->build();
    mesh = cfg.curve->snap_polyline ? polyline_snap(mesh, curve)
                                    : snap_to_curve(mesh, curve);
  }
  return mesh;
}

std::vector<DirichletPoint> resolve_bc(const RunConfig& cfg,
                                       const FoldMesh& mesh) {
  std::vector<DirichletPoint> bc;
  if (cfg.compression) {
    const auto pins = compression_bc(mesh, cfg.compression->s,
                                     cfg.compression->xd, cfg.compression->xd2);
    bc.insert(bc.end(), pins.begin(), pins.end());
  }
  for (const PinSpec& p : cfg.pins) bc.push_back(make_pin(mesh, p.locator, p.target));
  if (bc.empty() && !mesh.dirichlet.empty()) {
    // Mesh-file pin set with identity targets unless overridden.
    for (const DirichletPoint& d : mesh.dirichlet) {
      DirichletPoint pin = d;
      const Vec2& x = mesh.nodes[d.vertex];
      pin.target = Vec3(x.x(), x.y(), 0.0);
      bc.push_back(pin);
    }
  }
  return bc;
}

double flap_angle(const DGField& y, const std::vector<int>& regions,
                  int quad_order) {
  const FoldMesh& mesh = *y.mesh;
  const int nr = regions.empty()
                     ? 0
                     : 1 + *std::max_element(regions.begin(), regions.end());
  if (nr < 2) return 0.0;
  const QuadratureRule rule = ref_quadrature(quad_order);
  std::vector<Vec3> normal(nr, Vec3::Zero());
  std::vector<double> area(nr, 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Mat32 g = y.gradient(e, rule.points[q]);
      const Vec3 n = g.col(0).cross(g.col(1));
      const double nn = n.norm();
      const double w = rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
      if (nn > 0.0) normal[regions[e]] += w * (n / nn);
      area[regions[e]] += w;
    }
  }
  // The two largest regions carry the flap halves.
  int r0 = 0, r1 = 1;
  if (area[r1] > area[r0]) std::swap(r0, r1);
  for (int r = 2; r < nr; ++r) {
    if (area[r] > area[r0]) {
      r1 = r0;
      r0 = r;
    } else if (area[r] > area[r1]) {
      r1 = r;
    }
  }
  const double n0 = normal[r0].norm(), n1 = normal[r1].norm();
  if (n0 == 0.0 || n1 == 0.0) return 0.0;
  const double c =
      std::clamp(normal[r0].dot(normal[r1]) / (n0 * n1), -1.0, 1.0);
  return std::acos(c);
}

void write_flow_csv(const FlowReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "iter,bending,jump0,jump1,dirichlet,total,step_norm,violation\n";
  char buf[256];
  for (std::size_t i = 0; i < report.energies.size(); ++i) {
    const EnergyBreakdown& e = report.energies[i];
    const double sn = i == 0 ? 0.0 : report.step_norms[i - 1];
    std::snprintf(buf, sizeof(buf),
                  "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", i,
                  e.bending, e.jump0, e.jump1, e.dirichlet, e.total, sn,
                  report.violations[i]);
    out << buf << "\n";
  }
}

std::string summary_text(const RunSummary& s) {
  std::ostringstream out;
  const char* term = "max-iterations";
  if (s.flow.termination == FlowTermination::Stationary) term = "stationary";
  if (s.flow.termination == FlowTermination::AlreadyStationary)
    term = "already-stationary";
  out << "elements: " << s.mesh.num_elements() << "\n";
  out << "fold edges: " << s.mesh.fold_edge_ids().size() << "\n";
  out << "fold regions: " << s.num_regions << "\n";
  out << "preprocess steps: " << s.pp.descent_steps << "\n";
  out << "preprocess defect: " << s.pp.defect_final << "\n";
  out << "iterations: " << s.flow.iterations << "\n";
  out << "termination: " << term << "\n";
  out << "initial energy: " << s.flow.energies.front().total << "\n";
  out << "final energy: " << s.flow.energies.back().total << "\n";
  out << "final violation: " << s.flow.violations.back() << "\n";
  out << "max curvature: " << s.max_curvature << "\n";
  out << "flap angle: " << s.flap_angle << "\n";
  for (std::size_t r = 0; r < s.region_max_abs_z.size(); ++r)
    out << "region " << r << ": area " << s.region_area[r] << ", max |z| "
        << s.region_max_abs_z[r] << "\n";
  return out.str();
}

RunSummary execute_run(const RunConfig& cfg, bool write_outputs) {
  RunSummary s;
  s.config = cfg;
  s.mesh = build_domain(cfg);
  s.bc = resolve_bc(cfg, s.mesh);

  FlowSystem system(s.mesh, cfg.energy, s.bc, cfg.flow);
  auto [y0, pp] = system.preprocess();
  s.y0 = y0;
  s.pp = pp;

  namespace fs = std::filesystem;
  const fs::path dir = cfg.output.directory;
  std::function<void(int, const DGField&)> observer;
  if (write_outputs) {
    fs::create_directories(dir);
    if (cfg.output.vtk_stride > 0) {
      const int stride = cfg.output.vtk_stride;
      const fs::path snapdir = dir;
      observer = [stride, snapdir](int iter, const DGField& y) {
        if (iter % stride != 0) return;
        char name[48];
        std::snprintf(name, sizeof(name), "step_%04d.vtk", iter);
        write_vtk(y, {}, (snapdir / name).string());
      };
    }
  }

  auto [yf, flow] = system.run_flow(y0, observer);
  s.y_final = yf;
  s.flow = flow;

  s.regions = fold_regions(s.mesh);
  s.num_regions =
      s.regions.empty() ? 0 : 1 + *std::max_element(s.regions.begin(), s.regions.end());
  s.curvature = elementwise_curvature(system.model().hessian_op(), s.y_final);
  s.max_curvature =
      s.curvature.empty() ? 0.0 : *std::max_element(s.curvature.begin(), s.curvature.end());
  s.flap_angle = foldsim::flap_angle(s.y_final, s.regions, cfg.energy.quad_order);

  s.region_max_abs_z.assign(s.num_regions, 0.0);
  s.region_area.assign(s.num_regions, 0.0);
  const QuadratureRule rule = ref_quadrature(cfg.energy.quad_order);
  for (int e = 0; e < s.mesh.num_elements(); ++e) {
    const int r = s.regions[e];
    for (int a = 0; a < 6; ++a)
      s.region_max_abs_z[r] =
          std::max(s.region_max_abs_z[r],
                   std::abs(s.y_final.coeffs[DGField::dof(e, a, 2)]));
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      s.region_area[r] +=
          rule.weights[q] * s.mesh.map_data(e, rule.points[q]).detJ;
  }

  if (write_outputs) {
    std::ofstream rc(dir / "resolved.cfg");
    rc << resolved_dump(cfg);
    rc.close();
    write_flow_csv(s.flow, (dir / "flow.csv").string());
    write_vtk(s.y_final, s.curvature, (dir / "final.vtk").string());
    std::ofstream st(dir / "summary.txt");
    st << summary_text(s);
  }
  return s;
}

}  // namespace foldsim
