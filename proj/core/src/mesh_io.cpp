#include "foldsim/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace foldsim {

namespace {

struct LineReader {
  std::istream& in;
  std::string path;
  int line = 0;

  // Next content-bearing line (comments and blanks skipped).
  bool next(std::istringstream& out) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line;
      const std::size_t hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      std::size_t i = 0;
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i])))
        ++i;
      if (i == raw.size()) continue;
      out = std::istringstream(raw);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError(path + ":" + std::to_string(line) + ": " + msg);
  }
};

}  // namespace

FoldMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  LineReader reader{in, path};
  std::istringstream ls;

  auto expect_section = [&](const std::string& name) -> int {
    if (!reader.next(ls)) reader.fail("missing " + name + " section");
    std::string word;
    int count = -1;
    ls >> word >> count;
    if (word != name || count < 0)
      reader.fail("expected '" + name + " <count>'");
    return count;
  };

  FoldMesh mesh;
  const int nn = expect_section("NODES");
  mesh.nodes.resize(nn);
  for (int i = 0; i < nn; ++i) {
    if (!reader.next(ls)) reader.fail("truncated NODES section");
    int id;
    double x, y;
    if (!(ls >> id >> x >> y) || id != i)
      reader.fail("expected node " + std::to_string(i));
    mesh.nodes[i] = Vec2(x, y);
  }

  const int ne = expect_section("ELEMENTS");
  mesh.elements.resize(ne);
  std::vector<int> corner_use(nn, 0), mid_use(nn, 0);
  for (int e = 0; e < ne; ++e) {
    if (!reader.next(ls)) reader.fail("truncated ELEMENTS section");
    int id;
    if (!(ls >> id) || id != e) reader.fail("expected element " + std::to_string(e));
    std::set<int> seen;
    for (int a = 0; a < 6; ++a) {
      int nid;
      if (!(ls >> nid) || nid < 0 || nid >= nn)
        reader.fail("element " + std::to_string(e) + " has a bad node id");
      if (!seen.insert(nid).second)
        reader.fail("element " + std::to_string(e) + " repeats node " +
                    std::to_string(nid));
      mesh.elements[e].nodes[a] = nid;
      (a < 3 ? corner_use : mid_use)[nid] += 1;
    }
  }
  mesh.is_corner.assign(nn, false);
  for (int i = 0; i < nn; ++i) {
    if (corner_use[i] > 0 && mid_use[i] > 0)
      throw MeshError(path + ": node " + std::to_string(i) +
                      " is used both as a corner and as a midpoint");
    mesh.is_corner[i] = corner_use[i] > 0;
  }

  build_edges_from_elements(mesh);

  const int nf = expect_section("FOLD_EDGES");
  for (int i = 0; i < nf; ++i) {
    if (!reader.next(ls)) reader.fail("truncated FOLD_EDGES section");
    int a, b;
    if (!(ls >> a >> b)) reader.fail("expected a node pair");
    int found = -1;
    for (int ei = 0; ei < mesh.num_edges(); ++ei) {
      const Edge& ed = mesh.edges[ei];
      if ((ed.n0 == a && ed.n1 == b) || (ed.n0 == b && ed.n1 == a)) {
        found = ei;
        break;
      }
    }
    if (found < 0)
      reader.fail("fold edge " + std::to_string(a) + "-" + std::to_string(b) +
                  " is not a mesh edge");
    if (mesh.edges[found].elem_minus < 0)
      reader.fail("fold edge " + std::to_string(a) + "-" + std::to_string(b) +
                  " lies on the boundary");
    mesh.edges[found].tag = EdgeTag::Fold;
  }

  const int nd = expect_section("DIRICHLET_VERTICES");
  for (int i = 0; i < nd; ++i) {
    if (!reader.next(ls)) reader.fail("truncated DIRICHLET_VERTICES section");
    int v;
    if (!(ls >> v) || v < 0 || v >= nn) reader.fail("bad vertex id");
    DirichletPoint d;
    d.vertex = v;
    mesh.dirichlet.push_back(d);
  }

  refresh_edge_geometry(mesh);
  validate_mesh(mesh);
  return mesh;
}

void write_mesh(const FoldMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file '" + path + "'");
  char buf[128];
  out << "NODES " << mesh.num_nodes() << "\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d %.17g %.17g", i, mesh.nodes[i].x(),
                  mesh.nodes[i].y());
    out << buf << "\n";
  }
  out << "ELEMENTS " << mesh.num_elements() << "\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    out << e;
    for (int a = 0; a < 6; ++a) out << " " << mesh.elements[e].nodes[a];
    out << "\n";
  }
  const auto folds = mesh.fold_edge_ids();
  out << "FOLD_EDGES " << folds.size() << "\n";
  for (int ei : folds)
    out << mesh.edges[ei].n0 << " " << mesh.edges[ei].n1 << "\n";
  out << "DIRICHLET_VERTICES " << mesh.dirichlet.size() << "\n";
  for (const DirichletPoint& d : mesh.dirichlet) out << d.vertex << "\n";
}

}  // namespace foldsim
