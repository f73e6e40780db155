#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "foldsim/driver.hpp"

using namespace foldsim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("foldsim_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kBaseConfig = R"(# folding run
[domain]
width = 2.0
height = 1.5
target_h = 0.5

[curve]
kind = parabolic
p0 = 0 0.5
p1 = 2 0.5
apex = 1 1.1

[bc]
compression_s = 0.1
xd = 0 1.5
xd2 = 2 1.5

[flow]
tau = 0.02
max_iters = 3
eps_stop = 1e-8
rho_tilde = 20
eps_pp = 0.2
)";

}  // namespace

TEST_SUITE_BEGIN("appcli");

TEST_CASE("configs parse with defaults filled in") {
  const RunConfig cfg = parse_config_text(kBaseConfig, "base.cfg");
  CHECK(*cfg.domain.width == 2.0);
  CHECK(*cfg.domain.height == 1.5);
  CHECK(*cfg.domain.target_h == 0.5);
  REQUIRE(cfg.curve.has_value());
  CHECK(cfg.curve->kind == CurveKind::Parabolic);
  CHECK(cfg.curve->apex == Vec2(1.0, 1.1));
  CHECK(cfg.curve->snap_polyline == false);
  REQUIRE(cfg.compression.has_value());
  CHECK(cfg.compression->s == 0.1);
  CHECK(cfg.energy.gamma0 == 1.0);  // untouched default
  CHECK(cfg.flow.tau == 0.02);
  CHECK(cfg.flow.max_iters == 3);
  CHECK(cfg.output.directory == "out");
}

TEST_CASE("parse errors carry file, line, and column positions") {
  const char* bad_value = "[domain]\nwidth = banana\n";
  try {
    parse_config_text(bad_value, "broken.cfg");
    FAIL("expected a parse error");
  } catch (const ConfigError& err) {
    const std::string what = err.what();
    CHECK(what.find("broken.cfg:2:") != std::string::npos);
    CHECK(what.find("number") != std::string::npos);
  }

  const char* bad_key = "[domain]\nwidth = 1\nheight = 1\ntarget_h = 0.4\nwobble = 3\n";
  try {
    parse_config_text(bad_key, "broken.cfg");
    FAIL("expected a parse error");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("wobble") != std::string::npos);
    CHECK(std::string(err.what()).find(":5:") != std::string::npos);
  }

  const char* no_section = "width = 1\n";
  CHECK_THROWS_AS(parse_config_text(no_section, "x.cfg"), ConfigError);
}

TEST_CASE("validation names the missing or broken field") {
  try {
    parse_config_text("[domain]\nwidth = 2\ntarget_h = 0.5\n", "v.cfg");
    FAIL("expected a validation error");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("height") != std::string::npos);
  }
  try {
    parse_config_text(
        "[domain]\nwidth = 2\nheight = 2\ntarget_h = 0.5\n[energy]\ngamma0 = -1\n",
        "v.cfg");
    FAIL("expected a validation error");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("gamma0") != std::string::npos);
  }
  // A rectangle and a mesh file together are ambiguous.
  CHECK_THROWS_AS(
      parse_config_text(
          "[domain]\nwidth = 2\nheight = 2\ntarget_h = 0.5\nmesh = m.msh\n",
          "v.cfg"),
      ConfigError);
}

TEST_CASE("resolved dumps are canonical and stable") {
  const RunConfig cfg = parse_config_text(kBaseConfig, "base.cfg");
  const std::string dump1 = resolved_dump(cfg);
  // Defaults are echoed explicitly.
  CHECK(dump1.find("gamma0 = 1\n") != std::string::npos);
  CHECK(dump1.find("pp_perturb = 0.25\n") != std::string::npos);
  CHECK(dump1.find("snap = curved\n") != std::string::npos);
  // Reparsing the dump reproduces it byte for byte.
  const RunConfig cfg2 = parse_config_text(dump1, "dump.cfg");
  CHECK(resolved_dump(cfg2) == dump1);
}

TEST_CASE("overrides reach nested keys and the compression shorthand") {
  RunConfig cfg = parse_config_text(kBaseConfig, "base.cfg");
  apply_override(cfg, "s", "0.25");
  CHECK(cfg.compression->s == 0.25);
  apply_override(cfg, "flow.tau", "0.005");
  CHECK(cfg.flow.tau == 0.005);
  apply_override(cfg, "energy.gamma1", "2");
  CHECK(cfg.energy.gamma1 == 2.0);
  CHECK_THROWS_AS(apply_override(cfg, "nonsense", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "flow.nonsense", "1"), ConfigError);
}

TEST_CASE("meshes round-trip through the native format") {
  const fs::path dir = temp_dir("meshio");
  FoldMesh mesh = build_rect_mesh(2.0, 1.5, 0.5);
  mesh = snap_to_curve(mesh, make_parabolic_arc(Vec2(0.0, 0.5), Vec2(2.0, 0.5),
                                                Vec2(1.0, 1.1)));
  mesh.dirichlet.push_back(make_pin(mesh, Vec2(0.0, 0.0), Vec3::Zero()));
  mesh.dirichlet.push_back(make_pin(mesh, Vec2(2.0, 1.5), Vec3::Zero()));

  const fs::path file = dir / "mesh.msh";
  write_mesh(mesh, file.string());
  const FoldMesh loaded = load_mesh(file.string());

  REQUIRE(loaded.num_nodes() == mesh.num_nodes());
  REQUIRE(loaded.num_elements() == mesh.num_elements());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    // Full-precision text keeps the coordinates bit-exact.
    CHECK(loaded.nodes[i].x() == mesh.nodes[i].x());
    CHECK(loaded.nodes[i].y() == mesh.nodes[i].y());
  }
  CHECK(loaded.fold_edge_ids().size() == mesh.fold_edge_ids().size());
  REQUIRE(loaded.dirichlet.size() == 2);
  CHECK(loaded.dirichlet[0].vertex == mesh.dirichlet[0].vertex);

  // A second write is byte-identical.
  const fs::path file2 = dir / "mesh2.msh";
  write_mesh(loaded, file2.string());
  CHECK(slurp(file) == slurp(file2));
}

TEST_CASE("the mesh loader names structural problems") {
  const fs::path dir = temp_dir("meshio_err");
  const fs::path file = dir / "bad.msh";
  {
    std::ofstream out(file);
    out << "NODES 5\n";
    out << "0 0 0\n1 1 0\n2 0 1\n3 0.5 0\n4 0.25 0.5\n";
    out << "ELEMENTS 1\n";
    out << "0 0 1 2 4 4 3\n";  // node 4 appears twice
    out << "FOLD_EDGES 0\nDIRICHLET_VERTICES 0\n";
  }
  try {
    load_mesh(file.string());
    FAIL("expected a mesh error");
  } catch (const MeshError& err) {
    const std::string what = err.what();
    CHECK(what.find("element 0 repeats node 4") != std::string::npos);
  }

  // Tagging a boundary pair as a fold is rejected with the pair named.
  const fs::path file2 = dir / "bad2.msh";
  {
    FoldMesh mesh = build_rect_mesh(1.0, 1.0, 0.5);
    write_mesh(mesh, file2.string());
    // Append a fold on a boundary edge.
    std::string text = slurp(file2);
    int b0 = -1, b1 = -1;
    for (const Edge& e : mesh.edges)
      if (e.elem_minus < 0) {
        b0 = e.n0;
        b1 = e.n1;
        break;
      }
    const std::string needle = "FOLD_EDGES 0";
    text.replace(text.find(needle), needle.size(),
                 "FOLD_EDGES 1\n" + std::to_string(b0) + " " +
                     std::to_string(b1));
    std::ofstream out(file2);
    out << text;
  }
  CHECK_THROWS_AS(load_mesh(file2.string()), MeshError);
}

TEST_CASE("deformed sheets land in the VTK file with duplicated points") {
  const fs::path dir = temp_dir("vtk");
  const FoldMesh mesh = build_rect_mesh(2.0, 1.0, 0.5);
  const DGField y = interpolate(mesh, [](const Vec2& x) {
    return Vec3(std::sin(x.x()), x.y(), std::cos(x.x()));
  });
  std::vector<double> cell(mesh.num_elements(), 1.5);
  const fs::path file = dir / "sheet.vtk";
  write_vtk(y, cell, file.string());

  std::ifstream in(file);
  std::string line;
  int npoints = -1, ncells = -1, ntypes = 0, npointdata = -1, ncelldata = -1;
  double max_abs_z = 0.0;
  bool saw_vectors = false, saw_scalars = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "POINTS") {
      ls >> npoints;
      for (int i = 0; i < npoints; ++i) {
        double x, yy, z;
        in >> x >> yy >> z;
        max_abs_z = std::max(max_abs_z, std::abs(z));
      }
    } else if (word == "CELLS") {
      ls >> ncells;
      for (int i = 0; i < ncells; ++i) {
        int n;
        in >> n;
        CHECK(n == 6);
        int ids[6];
        for (int& id : ids) in >> id;
        // Corners come first and all indices stay inside this cell's block.
        for (int id : ids) {
          CHECK(id >= 6 * i);
          CHECK(id < 6 * (i + 1));
        }
      }
    } else if (word == "CELL_TYPES") {
      int n;
      ls >> n;
      for (int i = 0; i < n; ++i) {
        int t;
        in >> t;
        CHECK(t == 22);
        ++ntypes;
      }
    } else if (word == "POINT_DATA") {
      ls >> npointdata;
    } else if (word == "VECTORS") {
      saw_vectors = true;
    } else if (word == "CELL_DATA") {
      ls >> ncelldata;
    } else if (word == "SCALARS") {
      saw_scalars = true;
    }
  }
  CHECK(npoints == 6 * mesh.num_elements());
  CHECK(ncells == mesh.num_elements());
  CHECK(ntypes == mesh.num_elements());
  CHECK(npointdata == npoints);
  CHECK(ncelldata == mesh.num_elements());
  CHECK(saw_vectors);
  CHECK(saw_scalars);
  CHECK(max_abs_z == doctest::Approx(1.0).epsilon(1e-6));

  // Cell data size mismatches are refused.
  std::vector<double> short_cell(3, 0.0);
  CHECK_THROWS_AS(write_vtk(y, short_cell, (dir / "bad.vtk").string()),
                  InternalError);
}

TEST_CASE("flap angle measures the dihedral across a tagged crease") {
  const FoldMesh base = build_rect_mesh(2.0, 1.0, 0.25);
  const FoldMesh mesh =
      polyline_snap(base, make_polyline({Vec2(1.0, 0.0), Vec2(1.0, 1.0)}));
  const auto regions = fold_regions(mesh);

  const DGField flat = interpolate(
      mesh, [](const Vec2& x) { return Vec3(x.x(), x.y(), 0.0); });
  CHECK(flap_angle(flat, regions) < 1e-10);

  const double slope = 0.75;
  const DGField roof = interpolate(mesh, [&](const Vec2& x) {
    return Vec3(x.x(), x.y(), slope * std::min(x.x(), 2.0 - x.x()));
  });
  CHECK(flap_angle(roof, regions) ==
        doctest::Approx(2.0 * std::atan(slope)).epsilon(1e-12));

  // A single region reports a zero angle.
  const auto one_region = fold_regions(base);
  CHECK(flap_angle(flat, one_region) == 0.0);
}

TEST_CASE("domains build from config with snapping applied") {
  const RunConfig cfg = parse_config_text(kBaseConfig, "base.cfg");
  const FoldMesh mesh = build_domain(cfg);
  CHECK(mesh.has_folds());
  validate_mesh(mesh);
  const auto bc = resolve_bc(cfg, mesh);
  REQUIRE(bc.size() == 2);
  // s = 0.1 over the top edge: each pin moves 0.1 inward.
  CHECK((bc[0].target - Vec3(0.1, 1.5, 0.0)).norm() < 1e-12);
  CHECK((bc[1].target - Vec3(1.9, 1.5, 0.0)).norm() < 1e-12);
}

TEST_CASE("mesh-file domains fall back to stored pins at their positions") {
  const fs::path dir = temp_dir("domain");
  FoldMesh mesh = build_rect_mesh(1.0, 1.0, 0.5);
  mesh.dirichlet.push_back(make_pin(mesh, Vec2(0.0, 0.0), Vec3::Zero()));
  const fs::path file = dir / "m.msh";
  write_mesh(mesh, file.string());

  RunConfig cfg;
  cfg.domain.mesh_file = file.string();
  const FoldMesh loaded = build_domain(cfg);
  const auto bc = resolve_bc(cfg, loaded);
  REQUIRE(bc.size() == 1);
  // Identity targets keep the pinned corner in place.
  CHECK((bc[0].target - Vec3(0.0, 0.0, 0.0)).norm() == 0.0);
}

TEST_CASE("a full run writes its outputs and a consistent CSV") {
  const fs::path dir = temp_dir("run");
  RunConfig cfg = parse_config_text(kBaseConfig, "base.cfg");
  cfg.output.directory = (dir / "out").string();
  cfg.output.vtk_stride = 2;
  const RunSummary s = execute_run(cfg, true);

  CHECK(fs::exists(dir / "out" / "resolved.cfg"));
  CHECK(fs::exists(dir / "out" / "flow.csv"));
  CHECK(fs::exists(dir / "out" / "final.vtk"));
  CHECK(fs::exists(dir / "out" / "summary.txt"));
  CHECK(fs::exists(dir / "out" / "step_0000.vtk"));

  CHECK(slurp(dir / "out" / "resolved.cfg") == resolved_dump(cfg));

  const std::string csv = slurp(dir / "out" / "flow.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "iter,bending,jump0,jump1,dirichlet,total,step_norm,violation");
  int rows = 0;
  std::string row;
  while (std::getline(lines, row))
    if (!row.empty()) ++rows;
  CHECK(rows == s.flow.iterations + 1);

  CHECK(s.num_regions == 2);
  CHECK(s.curvature.size() == static_cast<std::size_t>(s.mesh.num_elements()));
  CHECK(s.region_area.size() == static_cast<std::size_t>(s.num_regions));
  const std::string summary = summary_text(s);
  CHECK(summary.find("iterations") != std::string::npos);
  CHECK(summary.find("flap angle") != std::string::npos);
}

TEST_SUITE_END();
