// Command-line driver: run a folding simulation, sweep a parameter,
// inspect meshes, or run the built-in self-checks.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "foldsim/driver.hpp"

namespace {

using namespace foldsim;

RunConfig load_with_overrides(const std::string& path,
                              const std::vector<std::string>& sets) {
  RunConfig cfg = load_config(path);
  for (const std::string& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& sets,
            const std::string& out_dir) {
  RunConfig cfg = load_with_overrides(config_path, sets);
  if (!out_dir.empty()) cfg.output.directory = out_dir;
  const RunSummary s = execute_run(cfg, true);
  std::cout << summary_text(s);
  std::cout << "outputs: " << cfg.output.directory << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& sets,
              const std::string& out_dir) {
  const std::size_t eq = param.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--param expects name=v1,v2,..., got '" + param + "'");
  const std::string name = param.substr(0, eq);
  std::vector<std::string> values;
  {
    std::string rest = param.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const std::size_t comma = rest.find(',', pos);
      values.push_back(rest.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (values.empty()) throw ConfigError("--param got an empty value list");

  namespace fs = std::filesystem;
  const RunConfig base = load_with_overrides(config_path, sets);
  const fs::path root = out_dir.empty() ? fs::path(base.output.directory)
                                        : fs::path(out_dir);
  fs::create_directories(root);
  std::ofstream summary(root / "sweep.csv");
  summary << name << ",iterations,preprocess_steps,flap_angle,final_total,"
             "final_violation,max_curvature\n";
  char buf[256];
  for (const std::string& v : values) {
    RunConfig cfg = base;
    apply_override(cfg, name, v);
    cfg.output.directory = (root / (name + "_" + v)).string();
    const RunSummary s = execute_run(cfg, true);
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.17g,%.17g,%.17g,%.17g",
                  v.c_str(), s.flow.iterations, s.pp.descent_steps,
                  s.flap_angle, s.flow.energies.back().total,
                  s.flow.violations.back(), s.max_curvature);
    summary << buf << "\n";
    std::cout << name << " = " << v << ": iterations " << s.flow.iterations
              << ", flap angle " << s.flap_angle << "\n";
  }
  std::cout << "sweep summary: " << (root / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_mesh_info(const std::string& path,
                  const std::vector<std::string>& sets) {
  FoldMesh mesh;
  if (path.size() > 4 && path.substr(path.size() - 4) == ".msh") {
    mesh = load_mesh(path);
  } else {
    mesh = build_domain(load_with_overrides(path, sets));
  }
  validate_mesh(mesh);
  const auto regions = fold_regions(mesh);
  const int nr =
      regions.empty() ? 0 : 1 + *std::max_element(regions.begin(), regions.end());
  double area = 0.0, hmin = 1e300, hmax = 0.0;
  const QuadratureRule rule = ref_quadrature(6);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      area += rule.weights[q] * mesh.map_data(e, rule.points[q]).detJ;
  int nboundary = 0, ninterior = 0;
  for (const Edge& e : mesh.edges) {
    hmin = std::min(hmin, e.h);
    hmax = std::max(hmax, e.h);
    if (e.elem_minus < 0)
      ++nboundary;
    else
      ++ninterior;
  }
  std::cout << "nodes: " << mesh.num_nodes() << "\n";
  std::cout << "elements: " << mesh.num_elements() << "\n";
  std::cout << "edges: " << mesh.num_edges() << " (" << ninterior
            << " interior, " << nboundary << " boundary)\n";
  std::cout << "fold edges: " << mesh.fold_edge_ids().size() << "\n";
  std::cout << "fold regions: " << nr << "\n";
  std::cout << "pinned vertices: " << mesh.dirichlet.size() << "\n";
  std::cout << "area: " << area << "\n";
  std::cout << "edge length range: [" << hmin << ", " << hmax << "]\n";
  return 0;
}

// --- verify: fast self-contained checks of the discretization -------------

struct Verify {
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name;
    if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

int cmd_verify() {
  Verify v;

  {
    // Quadrature exactness against closed-form monomial integrals.
    double worst = 0.0;
    for (int order = 1; order <= 8; ++order) {
      const QuadratureRule rule = ref_quadrature(order);
      for (int p = 0; p + 0 <= rule.order; ++p)
        for (int q = 0; p + q <= rule.order; ++q) {
          double s = 0.0;
          for (std::size_t i = 0; i < rule.points.size(); ++i)
            s += rule.weights[i] * std::pow(rule.points[i].x(), p) *
                 std::pow(rule.points[i].y(), q);
          const double exact =
              factorial(p) * factorial(q) / factorial(p + q + 2);
          worst = std::max(worst, std::abs(s - exact));
        }
    }
    v.check("quadrature exactness", worst < 1e-14,
            "worst residual " + std::to_string(worst));
  }

  const FoldMesh mesh = build_rect_mesh(1.0, 1.0, 0.5);
  {
    const auto ja = [&] {
      const DGField f = interpolate(mesh, [](const Vec2& x) {
        return Vec3(x.x() * x.x(), 0.0, 0.0);
      });
      return f;
    }();
    double worst = 0.0;
    for (int ei : mesh.interior_edges())
      for (double s : {0.2, 0.7}) {
        const JumpAvg j = eval_jump_avg(ja, ei, s);
        worst = std::max(worst, j.value_jump.norm());
      }
    v.check("continuous interpolant has no jumps", worst < 1e-12);
  }

  {
    // Reconstructed Hessian of a global quadratic.
    const DGField f = interpolate(mesh, [](const Vec2& x) {
      return Vec3(x.x() * x.x() + x.y() * x.y(), 0.0, 0.0);
    });
    const HessianOperator op(mesh);
    const HessianField h = op.apply(f);
    double worst = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const Mat2 he = h.eval(e, 0, Vec2(0.25, 0.25));
      worst = std::max(worst, (he - 2.0 * Mat2::Identity()).norm());
    }
    v.check("quadratic reproduces its Hessian", worst < 1e-10,
            "worst deviation " + std::to_string(worst));
  }

  {
    // Lifting duality on a random edge datum.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 0.0;
    const QuadratureRule rule = ref_quadrature(6);
    const EdgeQuadratureRule erule = edge_quadrature(6);
    for (int ei : mesh.interior_edges()) {
      const double a0 = uni(rng), a1 = uni(rng);
      const auto vhat = [&](double s) { return a0 + a1 * s; };
      const PatchMatrixField lift = lift_value_jump(mesh, ei, vhat);
      // Random constant matrix test field on each patch element.
      std::array<Mat2, 2> phi;
      for (auto& m : phi)
        m << uni(rng), uni(rng), uni(rng), uni(rng);
      double lhs = 0.0;
      for (int slot = 0; slot < 2; ++slot)
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
          const double w =
              rule.weights[q] *
              mesh.map_data(lift.elems[slot], rule.points[q]).detJ;
          lhs += w * (lift.eval(slot, rule.points[q]).cwiseProduct(phi[slot]))
                         .sum();
        }
      // Constant fields have zero divergence, so the identity reduces to 0.
      worst = std::max(worst, std::abs(lhs));
    }
    v.check("value lifting kills divergence-free test fields", worst < 1e-12,
            "worst residual " + std::to_string(worst));
  }

  {
    // Energy quadratic form agrees with the direct evaluation.
    std::mt19937 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::vector<DirichletPoint> bc = {
        make_pin(mesh, Vec2(0.0, 0.0), Vec3(0.1, -0.2, 0.3))};
    EnergyModel model(mesh, EnergyParams{}, bc);
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      DGField f = zero_field(mesh);
      for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = gauss(rng);
      const double direct = model.energy(f).total;
      const double form = model.quadratic_value(f.coeffs);
      worst = std::max(worst,
                       std::abs(direct - form) / (1.0 + std::abs(direct)));
    }
    v.check("assembled form matches direct energy", worst < 1e-10,
            "worst relative gap " + std::to_string(worst));
  }

  {
    // One constrained step from an admissible state decreases the energy.
    const FoldMesh m2 = build_rect_mesh(1.0, 1.0, 0.26);
    const DGField y = interpolate(m2, [](const Vec2& x) {
      return Vec3(std::sin(x.x()), x.y(), std::cos(x.x()));
    });
    FlowConfig fc;
    fc.tau = 0.05;
    fc.rho_tilde = 10.0;
    FlowSystem sys(m2, EnergyParams{}, {}, fc);
    const FlowStep st = sys.flow_step(y);
    const double e0 = sys.model().energy(y).total;
    const double e1 = sys.model().energy(st.y_next).total;
    v.check("constrained step decreases the energy", e1 <= e0 + 1e-12,
            "before " + std::to_string(e0) + ", after " + std::to_string(e1));
  }

  std::cout << (v.failures == 0 ? "all checks passed" : "CHECKS FAILED")
            << "\n";
  return v.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isometric sheet folding simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, param;
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "run one simulation");
  run->add_option("config", config_path, "configuration file")->required();
  run->add_option("--set", sets, "override entries, section.key=value");
  run->add_option("--output", out_dir, "output directory override");

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("config", config_path, "configuration file")->required();
  sweep->add_option("--param", param, "name=v1,v2,... (e.g. s=0,0.1,0.2)")
      ->required();
  sweep->add_option("--set", sets, "override entries, section.key=value");
  sweep->add_option("--output", out_dir, "output directory override");

  auto* info = app.add_subcommand("mesh-info", "inspect a mesh");
  info->add_option("path", config_path, "config file or .msh mesh file")
      ->required();
  info->add_option("--set", sets, "override entries, section.key=value");

  app.add_subcommand("verify", "run built-in discretization checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return cmd_run(config_path, sets, out_dir);
    if (app.got_subcommand("sweep"))
      return cmd_sweep(config_path, param, sets, out_dir);
    if (app.got_subcommand("mesh-info")) return cmd_mesh_info(config_path, sets);
    return cmd_verify();
  } catch (const foldsim::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
