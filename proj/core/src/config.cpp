#include "foldsim/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace foldsim {

FoldCurve CurveSpec::build() const {
  switch (kind) {
    case CurveKind::Parabolic:
      return make_parabolic_arc(p0, p1, apex);
    case CurveKind::CircularArc:
      return make_circular_arc(p0, p1, center);
    case CurveKind::CubicBezier:
      return make_cubic_bezier(p0, c1, c2, p1);
    case CurveKind::Polyline:
      return make_polyline(points);
  }
  throw ConfigError("unknown curve kind");
}

namespace {

struct Cursor {
  std::string file;
  int line = 0;
  int col = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(file + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": " + msg);
  }
};

std::vector<double> parse_numbers(const std::string& text, Cursor at,
                                  int expected) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos >= text.size()) break;
    at.col += static_cast<int>(pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text.substr(pos), &used);
    } catch (const std::exception&) {
      at.fail("expected a number, found '" + text.substr(pos) + "'");
    }
    out.push_back(v);
    at.col -= static_cast<int>(pos);
    pos += used;
  }
  if (expected >= 0 && static_cast<int>(out.size()) != expected)
    at.fail("expected " + std::to_string(expected) + " number(s), found " +
            std::to_string(out.size()));
  return out;
}

double parse_double(const std::string& text, const Cursor& at) {
  return parse_numbers(text, at, 1)[0];
}

int parse_int(const std::string& text, const Cursor& at) {
  const double v = parse_double(text, at);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) at.fail("expected an integer");
  return i;
}

Vec2 parse_vec2(const std::string& text, const Cursor& at) {
  const auto v = parse_numbers(text, at, 2);
  return Vec2(v[0], v[1]);
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Handles one key/value inside a section. `at` points at the value text.
void apply_kv(RunConfig& cfg, const std::string& section,
              const std::string& key, const std::string& value,
              const Cursor& at) {
  if (section == "domain") {
    if (key == "width")
      cfg.domain.width = parse_double(value, at);
    else if (key == "height")
      cfg.domain.height = parse_double(value, at);
    else if (key == "target_h")
      cfg.domain.target_h = parse_double(value, at);
    else if (key == "mesh")
      cfg.domain.mesh_file = value;
    else
      at.fail("unknown key '" + key + "' in [domain]");
  } else if (section == "curve") {
    if (!cfg.curve) cfg.curve.emplace();
    CurveSpec& c = *cfg.curve;
    if (key == "kind") {
      if (value == "parabolic")
        c.kind = CurveKind::Parabolic;
      else if (value == "circular")
        c.kind = CurveKind::CircularArc;
      else if (value == "cubic")
        c.kind = CurveKind::CubicBezier;
      else if (value == "polyline")
        c.kind = CurveKind::Polyline;
      else if (value == "none")
        cfg.curve.reset();
      else
        at.fail("unknown curve kind '" + value + "'");
    } else if (key == "p0")
      c.p0 = parse_vec2(value, at);
    else if (key == "p1")
      c.p1 = parse_vec2(value, at);
    else if (key == "apex")
      c.apex = parse_vec2(value, at);
    else if (key == "center")
      c.center = parse_vec2(value, at);
    else if (key == "c1")
      c.c1 = parse_vec2(value, at);
    else if (key == "c2")
      c.c2 = parse_vec2(value, at);
    else if (key == "points") {
      const auto v = parse_numbers(value, at, -1);
      if (v.size() < 4 || v.size() % 2 != 0)
        at.fail("polyline points need an even count of at least 4 numbers");
      c.points.clear();
      for (std::size_t i = 0; i < v.size(); i += 2)
        c.points.emplace_back(v[i], v[i + 1]);
    } else if (key == "snap") {
      if (value == "curved")
        c.snap_polyline = false;
      else if (value == "polyline")
        c.snap_polyline = true;
      else
        at.fail("snap must be 'curved' or 'polyline'");
    } else
      at.fail("unknown key '" + key + "' in [curve]");
  } else if (section == "bc") {
    if (key == "compression_s") {
      if (!cfg.compression) cfg.compression.emplace();
      cfg.compression->s = parse_double(value, at);
    } else if (key == "xd") {
      if (!cfg.compression) cfg.compression.emplace();
      cfg.compression->xd = parse_vec2(value, at);
    } else if (key == "xd2") {
      if (!cfg.compression) cfg.compression.emplace();
      cfg.compression->xd2 = parse_vec2(value, at);
    } else if (key == "pin") {
      const auto v = parse_numbers(value, at, 5);
      PinSpec p;
      p.locator = Vec2(v[0], v[1]);
      p.target = Vec3(v[2], v[3], v[4]);
      cfg.pins.push_back(p);
    } else
      at.fail("unknown key '" + key + "' in [bc]");
  } else if (section == "energy") {
    if (key == "gamma0")
      cfg.energy.gamma0 = parse_double(value, at);
    else if (key == "gamma1")
      cfg.energy.gamma1 = parse_double(value, at);
    else if (key == "gamma2")
      cfg.energy.gamma2 = parse_double(value, at);
    else if (key == "quad_order")
      cfg.energy.quad_order = parse_int(value, at);
    else if (key == "edge_order")
      cfg.energy.edge_order = parse_int(value, at);
    else
      at.fail("unknown key '" + key + "' in [energy]");
  } else if (section == "flow") {
    if (key == "tau")
      cfg.flow.tau = parse_double(value, at);
    else if (key == "eps_stop")
      cfg.flow.eps_stop = parse_double(value, at);
    else if (key == "eps_pp")
      cfg.flow.eps_pp = parse_double(value, at);
    else if (key == "rho_tilde")
      cfg.flow.rho_tilde = parse_double(value, at);
    else if (key == "alpha_energy")
      cfg.flow.alpha_energy = parse_double(value, at);
    else if (key == "alpha_mass")
      cfg.flow.alpha_mass = parse_double(value, at);
    else if (key == "max_iters")
      cfg.flow.max_iters = parse_int(value, at);
    else if (key == "pp_max_iters")
      cfg.flow.pp_max_iters = parse_int(value, at);
    else if (key == "pp_step0")
      cfg.flow.pp_step0 = parse_double(value, at);
    else if (key == "pp_armijo")
      cfg.flow.pp_armijo = parse_double(value, at);
    else if (key == "pp_backtrack")
      cfg.flow.pp_backtrack = parse_double(value, at);
    else if (key == "pp_perturb")
      cfg.flow.pp_perturb = parse_double(value, at);
    else
      at.fail("unknown key '" + key + "' in [flow]");
  } else if (section == "output") {
    if (key == "directory")
      cfg.output.directory = value;
    else if (key == "vtk_stride")
      cfg.output.vtk_stride = parse_int(value, at);
    else
      at.fail("unknown key '" + key + "' in [output]");
  } else {
    at.fail("unknown section [" + section + "]");
  }
}

void validate(const RunConfig& cfg, const std::string& file) {
  auto fail = [&](const std::string& msg) { throw ConfigError(file + ": " + msg); };
  const bool rect = cfg.domain.width || cfg.domain.height || cfg.domain.target_h;
  const bool meshfile = !cfg.domain.mesh_file.empty();
  if (rect && meshfile)
    fail("[domain] gives both a rectangle and a mesh file");
  if (!rect && !meshfile) fail("[domain] is missing");
  if (rect) {
    if (!cfg.domain.width) fail("[domain] is missing 'width'");
    if (!cfg.domain.height) fail("[domain] is missing 'height'");
    if (!cfg.domain.target_h) fail("[domain] is missing 'target_h'");
    if (*cfg.domain.width <= 0.0) fail("'width' must be positive");
    if (*cfg.domain.height <= 0.0) fail("'height' must be positive");
    if (*cfg.domain.target_h <= 0.0) fail("'target_h' must be positive");
  }
  if (cfg.curve) {
    const CurveSpec& c = *cfg.curve;
    if (c.kind == CurveKind::Polyline && c.points.size() < 2)
      fail("[curve] polyline needs 'points'");
  }
  if (cfg.compression) {
    if (cfg.compression->s < 0.0 || cfg.compression->s > 1.0)
      fail("'compression_s' must lie in [0, 1]");
  }
  if (cfg.energy.gamma0 <= 0.0) fail("'gamma0' must be positive");
  if (cfg.energy.gamma1 <= 0.0) fail("'gamma1' must be positive");
  if (cfg.energy.gamma2 <= 0.0) fail("'gamma2' must be positive");
  if (cfg.energy.quad_order < 1 || cfg.energy.quad_order > 8)
    fail("'quad_order' must lie in 1..8");
  if (cfg.energy.edge_order < 1 || cfg.energy.edge_order > 9)
    fail("'edge_order' must lie in 1..9");
  if (cfg.flow.tau <= 0.0) fail("'tau' must be positive");
  if (cfg.flow.eps_stop <= 0.0) fail("'eps_stop' must be positive");
  if (cfg.flow.eps_pp <= 0.0) fail("'eps_pp' must be positive");
  if (cfg.flow.rho_tilde <= 0.0) fail("'rho_tilde' must be positive");
  if (cfg.flow.max_iters < 1) fail("'max_iters' must be at least 1");
  if (cfg.flow.pp_backtrack <= 0.0 || cfg.flow.pp_backtrack >= 1.0)
    fail("'pp_backtrack' must lie in (0, 1)");
  if (cfg.flow.pp_perturb < 0.0) fail("'pp_perturb' must be nonnegative");
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& filename) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  Cursor at{filename, 0, 1};
  std::string section;
  while (std::getline(in, raw)) {
    ++at.line;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        at.col = 1;
        at.fail("unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        at.col = 1;
        at.fail("empty section name");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      at.col = static_cast<int>(raw.find(line.front())) + 1;
      at.fail("expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    Cursor vat = at;
    vat.col = static_cast<int>(raw.find('=')) + 2;
    if (key.empty()) {
      at.col = 1;
      at.fail("missing key before '='");
    }
    if (value.empty()) vat.fail("missing value for '" + key + "'");
    if (section.empty()) {
      at.col = 1;
      at.fail("key '" + key + "' appears before any section header");
    }
    apply_kv(cfg, section, key, value, vat);
  }
  validate(cfg, filename);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  Cursor at{"<override " + key + ">", 1, 1};
  if (key == "s") {
    apply_kv(cfg, "bc", "compression_s", value, at);
    return;
  }
  const std::size_t dot = key.find('.');
  if (dot == std::string::npos)
    throw ConfigError("override key '" + key +
                      "' must look like section.key (or 's')");
  apply_kv(cfg, key.substr(0, dot), key.substr(dot + 1), value, at);
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string num2(const Vec2& v) { return num(v.x()) + " " + num(v.y()); }

}  // namespace

std::string resolved_dump(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[domain]\n";
  if (!cfg.domain.mesh_file.empty()) {
    out << "mesh = " << cfg.domain.mesh_file << "\n";
  } else {
    out << "width = " << num(*cfg.domain.width) << "\n";
    out << "height = " << num(*cfg.domain.height) << "\n";
    out << "target_h = " << num(*cfg.domain.target_h) << "\n";
  }
  if (cfg.curve) {
    const CurveSpec& c = *cfg.curve;
    out << "\n[curve]\n";
    switch (c.kind) {
      case CurveKind::Parabolic:
        out << "kind = parabolic\n";
        out << "p0 = " << num2(c.p0) << "\n";
        out << "p1 = " << num2(c.p1) << "\n";
        out << "apex = " << num2(c.apex) << "\n";
        break;
      case CurveKind::CircularArc:
        out << "kind = circular\n";
        out << "p0 = " << num2(c.p0) << "\n";
        out << "p1 = " << num2(c.p1) << "\n";
        out << "center = " << num2(c.center) << "\n";
        break;
      case CurveKind::CubicBezier:
        out << "kind = cubic\n";
        out << "p0 = " << num2(c.p0) << "\n";
        out << "p1 = " << num2(c.p1) << "\n";
        out << "c1 = " << num2(c.c1) << "\n";
        out << "c2 = " << num2(c.c2) << "\n";
        break;
      case CurveKind::Polyline: {
        out << "kind = polyline\n";
        out << "points =";
        for (const Vec2& p : c.points) out << " " << num2(p);
        out << "\n";
        break;
      }
    }
    out << "snap = " << (c.snap_polyline ? "polyline" : "curved") << "\n";
  }
  out << "\n[bc]\n";
  if (cfg.compression) {
    out << "compression_s = " << num(cfg.compression->s) << "\n";
    out << "xd = " << num2(cfg.compression->xd) << "\n";
    out << "xd2 = " << num2(cfg.compression->xd2) << "\n";
  }
  for (const PinSpec& p : cfg.pins)
    out << "pin = " << num2(p.locator) << " " << num(p.target.x()) << " "
        << num(p.target.y()) << " " << num(p.target.z()) << "\n";
  out << "\n[energy]\n";
  out << "gamma0 = " << num(cfg.energy.gamma0) << "\n";
  out << "gamma1 = " << num(cfg.energy.gamma1) << "\n";
  out << "gamma2 = " << num(cfg.energy.gamma2) << "\n";
  out << "quad_order = " << cfg.energy.quad_order << "\n";
  out << "edge_order = " << cfg.energy.edge_order << "\n";
  out << "\n[flow]\n";
  out << "tau = " << num(cfg.flow.tau) << "\n";
  out << "eps_stop = " << num(cfg.flow.eps_stop) << "\n";
  out << "eps_pp = " << num(cfg.flow.eps_pp) << "\n";
  out << "rho_tilde = " << num(cfg.flow.rho_tilde) << "\n";
  out << "alpha_energy = " << num(cfg.flow.alpha_energy) << "\n";
  out << "alpha_mass = " << num(cfg.flow.alpha_mass) << "\n";
  out << "max_iters = " << cfg.flow.max_iters << "\n";
  out << "pp_max_iters = " << cfg.flow.pp_max_iters << "\n";
  out << "pp_step0 = " << num(cfg.flow.pp_step0) << "\n";
  out << "pp_armijo = " << num(cfg.flow.pp_armijo) << "\n";
  out << "pp_backtrack = " << num(cfg.flow.pp_backtrack) << "\n";
  out << "pp_perturb = " << num(cfg.flow.pp_perturb) << "\n";
  out << "\n[output]\n";
  out << "directory = " << cfg.output.directory << "\n";
  out << "vtk_stride = " << cfg.output.vtk_stride << "\n";
  return out.str();
}

}  // namespace foldsim
