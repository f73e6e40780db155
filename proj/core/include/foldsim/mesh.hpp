#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "foldsim/geometry.hpp"

namespace foldsim {

// --- Reference element -----------------------------------------------------
//
// Reference triangle with corners (0,0), (1,0), (0,1). Local nodes 0..2 are
// the corners in counterclockwise order; node 3+k is the midpoint of the edge
// opposite corner k, i.e. between corners (k+1)%3 and (k+2)%3. Local edge k
// runs from corner (k+1)%3 to corner (k+2)%3.

using Grad6 = Eigen::Matrix<double, 6, 2>;

std::array<double, 6> p2_shape(const Vec2& ref);
Grad6 p2_grad(const Vec2& ref);
// Constant reference second derivatives of the six quadratic shape functions.
const std::array<Mat2, 6>& p2_hess();

// Reference corner coordinates and the reference point at fraction u along
// local edge k (u measured from corner (k+1)%3 toward corner (k+2)%3).
Vec2 ref_corner(int k);
Vec2 ref_edge_point(int k, double u);

// --- Quadrature -------------------------------------------------------------

struct QuadratureRule {
  std::vector<Vec2> points;      // reference coordinates
  std::vector<double> weights;   // sum to 1/2 (reference triangle area)
  int order = 0;                 // polynomial degree integrated exactly
};

struct EdgeQuadratureRule {
  std::vector<double> points;    // on [0,1]
  std::vector<double> weights;   // sum to 1
  int order = 0;
};

// Symmetric positive-weight rule exact at least to the requested order;
// orders 1..8 are supported.
QuadratureRule ref_quadrature(int order);
EdgeQuadratureRule edge_quadrature(int order);

// --- Mesh -------------------------------------------------------------------

enum class EdgeTag : std::uint8_t { Interior, Fold, Boundary };

struct Edge {
  // Endpoint and midpoint node ids. n0 -> n1 is the traversal direction of
  // the plus element's local edge, so the chord normal below points from the
  // plus element into the minus element (outward on the boundary).
  int n0 = -1, n1 = -1, mid = -1;
  int elem_plus = -1, elem_minus = -1;   // elem_minus = -1 on the boundary
  int local_plus = -1, local_minus = -1; // local edge index in each element
  Vec2 normal = Vec2::Zero();            // unit chord normal
  double h = 0.0;                        // chord length |x(n1) - x(n0)|
  EdgeTag tag = EdgeTag::Interior;
};

struct Element {
  std::array<int, 6> nodes{};  // local node convention above
  std::array<int, 3> edges{};  // edges[k] is the edge opposite corner k
};

struct DirichletPoint {
  int vertex = -1;             // corner node id
  Vec3 target = Vec3::Zero();  // prescribed deformation value
  double h = 0.0;              // average length of the incident edges
};

struct MapData {
  Vec2 x = Vec2::Zero();    // physical point
  Mat2 J = Mat2::Zero();    // Jacobian of the reference map
  double detJ = 0.0;
};

struct EdgePoint {
  Vec2 x = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();  // d(position)/du along n0 -> n1
  double jac = 0.0;             // |tangent|, the line element
  Vec2 normal = Vec2::Zero();   // unit normal, same side as the chord normal
};

// Conforming quadratic triangulation with tagged fold edges. Elements are
// curved only where edge midpoints leave the chord (after snapping).
struct FoldMesh {
  std::vector<Vec2> nodes;        // corner and midpoint coordinates
  std::vector<bool> is_corner;    // true for corner (vertex) nodes
  std::vector<Element> elements;
  std::vector<Edge> edges;
  std::vector<DirichletPoint> dirichlet;  // default pin set (targets resolved later)

  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_nodes() const { return static_cast<int>(nodes.size()); }

  // Isoparametric map of one element at a reference point.
  MapData map_data(int elem, const Vec2& ref) const;
  // Second derivatives of the map: tensor[c](i,j) = d^2 x_c / dref_i dref_j.
  // Constant over the element for quadratic maps; zero on straight elements.
  std::array<Mat2, 2> map_second(int elem) const;

  // Geometry of an edge at fraction u in [0,1] from n0 toward n1.
  EdgePoint edge_point(int edge, double u) const;
  // Reference coordinates, in the plus (side 0) or minus (side 1) element,
  // of the edge point at fraction u.
  Vec2 edge_ref_point(int edge, int side, double u) const;

  double diameter() const;  // bounding-box diagonal
  bool has_folds() const;

  std::vector<int> interior_edges() const;
  std::vector<int> fold_edge_ids() const;
};

// Uniform crisscross triangulation of (0,width) x (0,height): each grid block
// is split into four triangles about its center. Block count per direction is
// ceil(extent / target_h); target_h must be smaller than min(width, height).
FoldMesh build_rect_mesh(double width, double height, double target_h);

// Align a vertex chain of the mesh with the arc and curve the chain's edges
// (midpoints projected onto the arc). Snapped edges are tagged as folds.
FoldMesh snap_to_curve(const FoldMesh& mesh, const FoldCurve& curve);

// Same vertex alignment, but chain edges stay straight (midpoints at segment
// midpoints): the fold is approximated by a polygonal line.
FoldMesh polyline_snap(const FoldMesh& mesh, const FoldCurve& curve);

// Rebuild edge normals/lengths and Dirichlet h values from node coordinates.
void refresh_edge_geometry(FoldMesh& mesh);

// Structural checks (orientation, conformity, positive Jacobians). Throws
// MeshError with a description of the first violation.
void validate_mesh(const FoldMesh& mesh);

// Element labels of the connected components obtained by walking across
// non-fold interior edges; labels are 0..(num_regions-1).
std::vector<int> fold_regions(const FoldMesh& mesh);

// Helpers shared by builders and the mesh loader.
FoldMesh build_from_corner_triangles(const std::vector<Vec2>& corners,
                                     const std::vector<std::array<int, 3>>& tris);
void build_edges_from_elements(FoldMesh& mesh);

}  // namespace foldsim
