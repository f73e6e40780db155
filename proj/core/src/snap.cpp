#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "foldsim/mesh.hpp"

namespace foldsim {

namespace {

// Corner-vertex adjacency via element edges; entries are (neighbor, edge id).
std::vector<std::vector<std::pair<int, int>>> corner_adjacency(
    const FoldMesh& mesh) {
  std::vector<std::vector<std::pair<int, int>>> adj(mesh.num_nodes());
  for (int i = 0; i < mesh.num_edges(); ++i) {
    const Edge& e = mesh.edges[i];
    adj[e.n0].emplace_back(e.n1, i);
    adj[e.n1].emplace_back(e.n0, i);
  }
  return adj;
}

int find_edge_between(const std::vector<std::vector<std::pair<int, int>>>& adj,
                      int a, int b) {
  for (const auto& [w, edge] : adj[a])
    if (w == b) return edge;
  return -1;
}

std::vector<bool> boundary_vertex_flags(const FoldMesh& mesh) {
  std::vector<bool> flags(mesh.num_nodes(), false);
  for (const Edge& e : mesh.edges)
    if (e.tag == EdgeTag::Boundary) {
      flags[e.n0] = true;
      flags[e.n1] = true;
    }
  return flags;
}

int nearest_corner(const FoldMesh& mesh, const std::vector<bool>& on_boundary,
                   const Vec2& p, bool boundary_only) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.num_nodes(); ++v) {
    if (!mesh.is_corner[v]) continue;
    if (boundary_only && !on_boundary[v]) continue;
    const double d = (mesh.nodes[v] - p).squaredNorm();
    if (d < bd) {
      bd = d;
      best = v;
    }
  }
  if (best < 0) throw SnapFailure("mesh has no corner vertices");
  return best;
}

FoldMesh snap_impl(const FoldMesh& input, const FoldCurve& curve,
                   bool curved_midpoints) {
  FoldMesh mesh = input;
  const double diam = mesh.diameter();
  const auto adj = corner_adjacency(mesh);
  const std::vector<bool> on_boundary = boundary_vertex_flags(mesh);

  const int v_start = nearest_corner(mesh, on_boundary, curve.start(), true);
  const int v_end = nearest_corner(mesh, on_boundary, curve.finish(), true);
  if (v_start == v_end)
    throw SnapFailure("arc resolves to fewer than two mesh vertices");

  // Greedy monotone walk: step to the unvisited neighbor closest to the part
  // of the arc strictly ahead of the current parameter. Projections that
  // clamp to the window start make no progress and are skipped, which keeps
  // the chain from doubling back on itself.
  std::vector<int> chain{v_start};
  std::vector<double> tval{0.0};
  std::vector<bool> visited(mesh.num_nodes(), false);
  visited[v_start] = true;
  double tcur = 0.0;
  const int cap = 4 * mesh.num_nodes();
  for (int v = v_start, steps = 0; v != v_end; ++steps) {
    if (steps > cap) throw SnapFailure("arc walk failed to terminate");
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    double bt = 0.0;
    for (const auto& [w, e] : adj[v]) {
      if (visited[w]) continue;
      const auto pr = curve.closest_point_in_range(mesh.nodes[w], tcur, 1.0);
      if (!(pr.t > tcur)) continue;
      if (pr.dist < bd) {
        bd = pr.dist;
        best = w;
        bt = pr.t;
      }
    }
    if (best < 0)
      throw SnapFailure("arc walk stalled at vertex " + std::to_string(v));
    v = best;
    visited[v] = true;
    chain.push_back(v);
    tval.push_back(v == v_end ? 1.0 : bt);
    tcur = bt;
  }

  // Drop chain vertices that would fold a triangle flat: when two
  // consecutive chain edges are sides of one mesh triangle (the direct edge
  // between their outer endpoints exists) and moving all three corners onto
  // the arc collapses or flips the triangle, release the middle vertex and
  // let the chain take the direct edge instead.
  const auto signed_area = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 u = b - a, w = c - a;
    return u.x() * w.y() - u.y() * w.x();
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
      if (find_edge_between(adj, chain[i - 1], chain[i + 1]) < 0)
        continue;
      const double a0 = signed_area(mesh.nodes[chain[i - 1]],
                                    mesh.nodes[chain[i]],
                                    mesh.nodes[chain[i + 1]]);
      const double a1 = signed_area(curve.eval(tval[i - 1]),
                                    curve.eval(tval[i]),
                                    curve.eval(tval[i + 1]));
      if (a1 * (a0 > 0.0 ? 1.0 : -1.0) >= 0.05 * std::abs(a0)) continue;
      chain.erase(chain.begin() + i);
      tval.erase(tval.begin() + i);
      changed = true;
      --i;
    }
  }

  const std::size_t n = chain.size();
  if (n < 2)
    throw SnapFailure("arc resolves to fewer than two mesh vertices");
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (tval[i] <= tval[i - 1])
      throw SnapFailure("chain vertices project to non-increasing parameters");
  if (tval[n - 2] >= 1.0)
    throw SnapFailure("chain vertices project to non-increasing parameters");

  // Move chain vertices onto the arc; record the largest displacement.
  double moved = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 target = curve.eval(tval[i]);
    moved = std::max(moved, (target - mesh.nodes[chain[i]]).norm());
    mesh.nodes[chain[i]] = target;
  }

  // Tag chain edges: interior ones become folds, boundary ones keep their tag.
  std::vector<int> chain_edges(n - 1, -1);
  std::vector<bool> on_chain(mesh.num_nodes(), false);
  for (int v : chain) on_chain[v] = true;
  std::set<int> chain_edge_set;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int e = find_edge_between(adj, chain[i], chain[i + 1]);
    if (e < 0) throw SnapFailure("chain skipped a mesh edge");
    chain_edges[i] = e;
    chain_edge_set.insert(e);
    if (mesh.edges[e].tag != EdgeTag::Boundary) mesh.edges[e].tag = EdgeTag::Fold;
  }

  // Guarded averaging sweeps spread the snap deformation into the
  // surrounding mesh; chain and boundary vertices stay put. A move is
  // accepted only if every incident corner triangle keeps positive
  // orientation (or, for a star the vertex moves already inverted, if the
  // worst orientation strictly improves), so the sweeps untangle without
  // ever pulling a vertex across the chain.
  if (moved >= 1e-12 * diam) {
    std::vector<std::vector<int>> star(mesh.num_nodes());
    for (int e = 0; e < mesh.num_elements(); ++e)
      for (int k = 0; k < 3; ++k) star[mesh.elements[e].nodes[k]].push_back(e);
    const auto worst_area = [&](int v, const Vec2& pos) {
      double worst = std::numeric_limits<double>::infinity();
      for (const int e : star[v]) {
        Vec2 c[3];
        for (int k = 0; k < 3; ++k) {
          const int nk = mesh.elements[e].nodes[k];
          c[k] = nk == v ? pos : mesh.nodes[nk];
        }
        const Vec2 u = c[1] - c[0], w = c[2] - c[0];
        worst = std::min(worst, 0.5 * (u.x() * w.y() - u.y() * w.x()));
      }
      return worst;
    };
    for (int sweep = 0; sweep < 80; ++sweep) {
      double shift = 0.0;
      for (int v = 0; v < mesh.num_nodes(); ++v) {
        if (!mesh.is_corner[v] || on_chain[v] || on_boundary[v]) continue;
        Vec2 sum = Vec2::Zero();
        int count = 0;
        for (const auto& [w, e] : adj[v]) {
          sum += mesh.nodes[w];
          ++count;
        }
        if (count == 0) continue;
        const Vec2 target = sum / count;
        const double q0 = worst_area(v, mesh.nodes[v]);
        for (const double w : {1.0, 0.5, 0.25}) {
          const Vec2 cand = mesh.nodes[v] + w * (target - mesh.nodes[v]);
          const double q = worst_area(v, cand);
          if (q0 > 0.0 ? q > 0.0 : q > q0) {
            shift = std::max(shift, (cand - mesh.nodes[v]).norm());
            mesh.nodes[v] = cand;
            break;
          }
        }
      }
      if (shift < 1e-14 * diam) break;
    }
  }

  // Midpoints: chain edges follow the arc (or stay straight in polyline
  // mode); all other edges are straight segments.
  for (int i = 0; i < mesh.num_edges(); ++i) {
    const Edge& e = mesh.edges[i];
    const Vec2 straight = 0.5 * (mesh.nodes[e.n0] + mesh.nodes[e.n1]);
    if (curved_midpoints && chain_edge_set.count(i)) {
      const auto it =
          std::find(chain_edges.begin(), chain_edges.end(), i);
      const std::size_t k = it - chain_edges.begin();
      const auto pr =
          curve.closest_point_in_range(straight, tval[k], tval[k + 1]);
      mesh.nodes[e.mid] = pr.point;
    } else {
      mesh.nodes[e.mid] = straight;
    }
  }

  refresh_edge_geometry(mesh);

  const QuadratureRule rule = ref_quadrature(6);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (const Vec2& q : rule.points)
      if (mesh.map_data(e, q).detJ <= 0.0)
        throw SnapFailure("snapping inverted element " + std::to_string(e));
  return mesh;
}

}  // namespace

FoldMesh snap_to_curve(const FoldMesh& mesh, const FoldCurve& curve) {
  return snap_impl(mesh, curve, true);
}

FoldMesh polyline_snap(const FoldMesh& mesh, const FoldCurve& curve) {
  return snap_impl(mesh, curve, false);
}

}  // namespace foldsim
