#include "foldsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace foldsim {

namespace {

// Outward normal of a CCW-traversed edge direction.
Vec2 perp_cw(const Vec2& v) { return Vec2(v.y(), -v.x()); }

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

MapData FoldMesh::map_data(int elem, const Vec2& ref) const {
  const Element& el = elements[elem];
  const auto phi = p2_shape(ref);
  const Grad6 dphi = p2_grad(ref);
  MapData md;
  md.J.setZero();
  for (int a = 0; a < 6; ++a) {
    const Vec2& xa = nodes[el.nodes[a]];
    md.x += phi[a] * xa;
    md.J += xa * dphi.row(a);
  }
  md.detJ = md.J.determinant();
  return md;
}

std::array<Mat2, 2> FoldMesh::map_second(int elem) const {
  const Element& el = elements[elem];
  const auto& hess = p2_hess();
  std::array<Mat2, 2> out{Mat2::Zero(), Mat2::Zero()};
  for (int a = 0; a < 6; ++a) {
    const Vec2& xa = nodes[el.nodes[a]];
    out[0] += xa.x() * hess[a];
    out[1] += xa.y() * hess[a];
  }
  return out;
}

EdgePoint FoldMesh::edge_point(int edge, double u) const {
  const Edge& e = edges[edge];
  const Vec2 &x0 = nodes[e.n0], &x1 = nodes[e.n1], &xm = nodes[e.mid];
  // 1D quadratic Lagrange basis on {0, 1, 1/2}.
  const double s0 = (1.0 - u) * (1.0 - 2.0 * u);
  const double s1 = u * (2.0 * u - 1.0);
  const double sm = 4.0 * u * (1.0 - u);
  const double d0 = 4.0 * u - 3.0, d1 = 4.0 * u - 1.0, dm = 4.0 - 8.0 * u;
  EdgePoint ep;
  ep.x = s0 * x0 + s1 * x1 + sm * xm;
  ep.tangent = d0 * x0 + d1 * x1 + dm * xm;
  ep.jac = ep.tangent.norm();
  ep.normal = perp_cw(ep.tangent) / ep.jac;
  if (ep.normal.dot(e.normal) < 0.0) ep.normal = -ep.normal;
  return ep;
}

Vec2 FoldMesh::edge_ref_point(int edge, int side, double u) const {
  const Edge& e = edges[edge];
  // The plus element traverses n0 -> n1; a CCW-conforming minus element
  // traverses the shared edge in the opposite direction.
  if (side == 0) return ref_edge_point(e.local_plus, u);
  return ref_edge_point(e.local_minus, 1.0 - u);
}

double FoldMesh::diameter() const {
  Vec2 lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
  Vec2 hi = -lo;
  for (const Vec2& p : nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

bool FoldMesh::has_folds() const {
  return std::any_of(edges.begin(), edges.end(),
                     [](const Edge& e) { return e.tag == EdgeTag::Fold; });
}

std::vector<int> FoldMesh::interior_edges() const {
  std::vector<int> out;
  for (int i = 0; i < num_edges(); ++i)
    if (edges[i].elem_minus >= 0) out.push_back(i);
  return out;
}

std::vector<int> FoldMesh::fold_edge_ids() const {
  std::vector<int> out;
  for (int i = 0; i < num_edges(); ++i)
    if (edges[i].tag == EdgeTag::Fold) out.push_back(i);
  return out;
}

FoldMesh build_from_corner_triangles(
    const std::vector<Vec2>& corners,
    const std::vector<std::array<int, 3>>& tris) {
  FoldMesh mesh;
  mesh.nodes = corners;
  mesh.is_corner.assign(corners.size(), true);
  mesh.elements.reserve(tris.size());

  std::map<std::pair<int, int>, int> mid_of;
  for (const auto& t : tris) {
    const Vec2 &a = corners[t[0]], &b = corners[t[1]], &c = corners[t[2]];
    if (cross2(b - a, c - a) <= 0.0)
      throw MeshError("element " + std::to_string(mesh.elements.size()) +
                      " is not counterclockwise");
    Element el;
    el.nodes[0] = t[0];
    el.nodes[1] = t[1];
    el.nodes[2] = t[2];
    for (int k = 0; k < 3; ++k) {
      const int p = t[(k + 1) % 3], q = t[(k + 2) % 3];
      const auto key = std::minmax(p, q);
      auto it = mid_of.find(key);
      if (it == mid_of.end()) {
        const int id = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(0.5 * (corners[p] + corners[q]));
        mesh.is_corner.push_back(false);
        it = mid_of.emplace(key, id).first;
      }
      el.nodes[3 + k] = it->second;
    }
    mesh.elements.push_back(el);
  }
  build_edges_from_elements(mesh);
  return mesh;
}

void build_edges_from_elements(FoldMesh& mesh) {
  mesh.edges.clear();
  std::map<std::pair<int, int>, int> edge_of;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Element& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      const int a = el.nodes[(k + 1) % 3], b = el.nodes[(k + 2) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge ed;
        ed.n0 = a;
        ed.n1 = b;
        ed.mid = el.nodes[3 + k];
        ed.elem_plus = e;
        ed.local_plus = k;
        ed.tag = EdgeTag::Boundary;
        const int id = static_cast<int>(mesh.edges.size());
        mesh.edges.push_back(ed);
        edge_of.emplace(key, id);
        el.edges[k] = id;
      } else {
        Edge& ed = mesh.edges[it->second];
        if (ed.elem_minus >= 0)
          throw MeshError("edge shared by more than two elements near node " +
                          std::to_string(a));
        if (ed.mid != el.nodes[3 + k])
          throw MeshError("elements " + std::to_string(ed.elem_plus) + " and " +
                          std::to_string(e) +
                          " disagree on a shared midpoint node");
        ed.elem_minus = e;
        ed.local_minus = k;
        ed.tag = EdgeTag::Interior;
        el.edges[k] = it->second;
      }
    }
  }
  refresh_edge_geometry(mesh);
}

void refresh_edge_geometry(FoldMesh& mesh) {
  for (Edge& e : mesh.edges) {
    const Vec2 chord = mesh.nodes[e.n1] - mesh.nodes[e.n0];
    e.h = chord.norm();
    if (e.h <= 0.0) throw MeshError("zero-length edge");
    e.normal = perp_cw(chord) / e.h;
  }
  for (DirichletPoint& d : mesh.dirichlet) {
    double sum = 0.0;
    int count = 0;
    for (const Edge& e : mesh.edges)
      if (e.n0 == d.vertex || e.n1 == d.vertex) {
        sum += e.h;
        ++count;
      }
    d.h = count > 0 ? sum / count : 0.0;
  }
}

void validate_mesh(const FoldMesh& mesh) {
  const int nn = mesh.num_nodes();
  if (static_cast<int>(mesh.is_corner.size()) != nn)
    throw MeshError("corner flag table size mismatch");
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Element& el = mesh.elements[e];
    for (int a = 0; a < 6; ++a)
      if (el.nodes[a] < 0 || el.nodes[a] >= nn)
        throw MeshError("element " + std::to_string(e) +
                        " references a missing node");
    for (int k = 0; k < 3; ++k) {
      if (!mesh.is_corner[el.nodes[k]])
        throw MeshError("element " + std::to_string(e) +
                        " uses a midpoint node as a corner");
      if (mesh.is_corner[el.nodes[3 + k]])
        throw MeshError("element " + std::to_string(e) +
                        " uses a corner node as a midpoint");
    }
    const Vec2 &a = mesh.nodes[el.nodes[0]], &b = mesh.nodes[el.nodes[1]],
               &c = mesh.nodes[el.nodes[2]];
    if (cross2(b - a, c - a) <= 0.0)
      throw MeshError("element " + std::to_string(e) +
                      " is not counterclockwise");
  }
  for (int i = 0; i < mesh.num_edges(); ++i) {
    const Edge& ed = mesh.edges[i];
    if (ed.tag == EdgeTag::Fold && ed.elem_minus < 0)
      throw MeshError("boundary edge " + std::to_string(i) +
                      " tagged as a fold");
    const Element& p = mesh.elements[ed.elem_plus];
    if (p.nodes[(ed.local_plus + 1) % 3] != ed.n0 ||
        p.nodes[(ed.local_plus + 2) % 3] != ed.n1)
      throw MeshError("edge " + std::to_string(i) +
                      " disagrees with its plus element traversal");
    if (ed.elem_minus >= 0) {
      const Element& m = mesh.elements[ed.elem_minus];
      if (m.nodes[(ed.local_minus + 1) % 3] != ed.n1 ||
          m.nodes[(ed.local_minus + 2) % 3] != ed.n0)
        throw MeshError("edge " + std::to_string(i) +
                        " is not traversed oppositely by its minus element");
    }
  }
  const QuadratureRule rule = ref_quadrature(6);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (const Vec2& q : rule.points)
      if (mesh.map_data(e, q).detJ <= 0.0)
        throw MeshError("element " + std::to_string(e) +
                        " has a non-positive Jacobian");
  for (const DirichletPoint& d : mesh.dirichlet) {
    if (d.vertex < 0 || d.vertex >= nn || !mesh.is_corner[d.vertex])
      throw MeshError("pinned vertex id " + std::to_string(d.vertex) +
                      " is not a corner node");
  }
}

std::vector<int> fold_regions(const FoldMesh& mesh) {
  std::vector<int> parent(mesh.num_elements());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : mesh.edges)
    if (e.elem_minus >= 0 && e.tag == EdgeTag::Interior)
      parent[find(e.elem_plus)] = find(e.elem_minus);
  std::vector<int> label(mesh.num_elements(), -1);
  int next = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const int r = find(e);
    if (label[r] < 0) label[r] = next++;
    label[e] = label[r];
  }
  return label;
}

FoldMesh build_rect_mesh(double width, double height, double target_h) {
  if (width <= 0.0 || height <= 0.0)
    throw MeshResolution("rectangle dimensions must be positive");
  if (target_h <= 0.0 || target_h >= std::min(width, height))
    throw MeshResolution("target size " + std::to_string(target_h) +
                         " cannot resolve a " + std::to_string(width) + " x " +
                         std::to_string(height) + " rectangle");
  const int nx = static_cast<int>(std::ceil(width / target_h));
  const int ny = static_cast<int>(std::ceil(height / target_h));
  const double dx = width / nx, dy = height / ny;

  std::vector<Vec2> corners;
  corners.reserve((nx + 1) * (ny + 1) + nx * ny);
  auto grid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) corners.emplace_back(i * dx, j * dy);
  const int center0 = static_cast<int>(corners.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      corners.emplace_back((i + 0.5) * dx, (j + 0.5) * dy);

  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = grid(i, j), v10 = grid(i + 1, j);
      const int v01 = grid(i, j + 1), v11 = grid(i + 1, j + 1);
      const int c = center0 + j * nx + i;
      tris.push_back({v00, v10, c});
      tris.push_back({v10, v11, c});
      tris.push_back({v11, v01, c});
      tris.push_back({v01, v00, c});
    }
  return build_from_corner_triangles(corners, tris);
}

}  // namespace foldsim
