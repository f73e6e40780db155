#pragma once

#include <string>
#include <vector>

#include "foldsim/dgspace.hpp"

namespace foldsim {

// Legacy ASCII file of quadratic triangles at their deformed positions, with
// the deformation as point data and an optional per-element scalar (usually
// the curvature density) as cell data. Points are duplicated per element,
// matching the discontinuous discretization.
void write_vtk(const DGField& field, const std::vector<double>& cell_scalar,
               const std::string& path);

}  // namespace foldsim
