#pragma once

#include <string>

#include "foldsim/mesh.hpp"

namespace foldsim {

// Native mesh format: NODES / ELEMENTS / FOLD_EDGES / DIRICHLET_VERTICES
// sections, '#' comments, full-precision coordinates. Round-trips exactly.
FoldMesh load_mesh(const std::string& path);
void write_mesh(const FoldMesh& mesh, const std::string& path);

}  // namespace foldsim
