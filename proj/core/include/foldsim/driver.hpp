#pragma once

#include "foldsim/config.hpp"
#include "foldsim/mesh_io.hpp"
#include "foldsim/vtk.hpp"

namespace foldsim {

struct RunSummary {
  RunConfig config;
  FoldMesh mesh;  // after snapping
  std::vector<DirichletPoint> bc;
  DGField y0, y_final;
  PpReport pp;
  FlowReport flow;
  std::vector<int> regions;       // fold-region label per element
  int num_regions = 0;
  std::vector<double> curvature;  // per element
  double max_curvature = 0.0;
  double flap_angle = 0.0;        // between the two largest fold regions
  std::vector<double> region_max_abs_z;
  std::vector<double> region_area;
};

// Mesh from the domain section, snapped to the fold arc if one is given.
FoldMesh build_domain(const RunConfig& cfg);

// Pins from the compression shorthand and the explicit pin list.
std::vector<DirichletPoint> resolve_bc(const RunConfig& cfg,
                                       const FoldMesh& mesh);

// Angle between the area-weighted average surface normals of the two
// largest fold regions; zero when there is at most one region.
double flap_angle(const DGField& y, const std::vector<int>& regions,
                  int quad_order = 6);

// Preprocess, run the flow, and derive the summary statistics. When
// write_outputs is set, the resolved config, iteration CSV, final deformed
// sheet, and a text summary are written into the output directory.
RunSummary execute_run(const RunConfig& cfg, bool write_outputs);

void write_flow_csv(const FlowReport& report, const std::string& path);
std::string summary_text(const RunSummary& s);

}  // namespace foldsim
