#include "foldsim/vtk.hpp"

#include <cstdio>
#include <fstream>

namespace foldsim {

void write_vtk(const DGField& field, const std::vector<double>& cell_scalar,
               const std::string& path) {
  const FoldMesh& mesh = *field.mesh;
  const int ne = mesh.num_elements();
  if (!cell_scalar.empty() && static_cast<int>(cell_scalar.size()) != ne)
    throw InternalError("cell data size does not match the element count");

  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  char buf[160];

  out << "# vtk DataFile Version 3.0\n";
  out << "deformed sheet\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 6 * ne << " double\n";
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < 6; ++a) {
      Vec3 y;
      for (int c = 0; c < 3; ++c) y[c] = field.coeffs[DGField::dof(e, a, c)];
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", y.x(), y.y(),
                    y.z());
      out << buf << "\n";
    }

  // Quadratic triangle connectivity: corners first, then the midpoints of
  // edges 0-1, 1-2, 2-0, which are local nodes 5, 3, 4 here.
  out << "CELLS " << ne << " " << 7 * ne << "\n";
  for (int e = 0; e < ne; ++e) {
    const int base = 6 * e;
    out << "6 " << base + 0 << " " << base + 1 << " " << base + 2 << " "
        << base + 5 << " " << base + 3 << " " << base + 4 << "\n";
  }
  out << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) out << "22\n";

  out << "POINT_DATA " << 6 * ne << "\n";
  out << "VECTORS deformation double\n";
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < 6; ++a) {
      const Vec2& x = mesh.nodes[mesh.elements[e].nodes[a]];
      Vec3 y;
      for (int c = 0; c < 3; ++c) y[c] = field.coeffs[DGField::dof(e, a, c)];
      const Vec3 disp = y - Vec3(x.x(), x.y(), 0.0);
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", disp.x(), disp.y(),
                    disp.z());
      out << buf << "\n";
    }

  if (!cell_scalar.empty()) {
    out << "CELL_DATA " << ne << "\n";
    out << "SCALARS curvature double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e) {
      std::snprintf(buf, sizeof(buf), "%.17g", cell_scalar[e]);
      out << buf << "\n";
    }
  }
}

}  // namespace foldsim
