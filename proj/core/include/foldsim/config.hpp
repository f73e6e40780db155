#pragma once

#include <optional>
#include <string>

#include "foldsim/flow.hpp"

namespace foldsim {

struct CurveSpec {
  CurveKind kind = CurveKind::Parabolic;
  Vec2 p0 = Vec2::Zero(), p1 = Vec2::Zero();
  Vec2 apex = Vec2::Zero();                 // parabolic
  Vec2 center = Vec2::Zero();               // circular
  Vec2 c1 = Vec2::Zero(), c2 = Vec2::Zero();  // cubic
  std::vector<Vec2> points;                 // polyline
  bool snap_polyline = false;  // approximate the arc by straight chain edges

  FoldCurve build() const;
};

struct PinSpec {
  Vec2 locator = Vec2::Zero();
  Vec3 target = Vec3::Zero();
};

struct CompressionSpec {
  double s = 0.0;
  Vec2 xd = Vec2::Zero(), xd2 = Vec2::Zero();
};

struct DomainSpec {
  // Exactly one of the two sources is set.
  std::optional<double> width, height, target_h;
  std::string mesh_file;
};

struct OutputSpec {
  std::string directory = "out";
  int vtk_stride = 0;  // also write a deformed snapshot every N steps
};

struct RunConfig {
  DomainSpec domain;
  std::optional<CurveSpec> curve;
  std::vector<PinSpec> pins;
  std::optional<CompressionSpec> compression;
  EnergyParams energy;
  FlowConfig flow;
  OutputSpec output;
};

// Parse and validate; errors carry file:line:column positions.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text,
                            const std::string& filename);

// Canonical dump with every field (defaults included) at full precision;
// byte-identical for identical configurations.
std::string resolved_dump(const RunConfig& cfg);

// Set one value by "section.key" (the config-file names); "s" is shorthand
// for bc.compression_s.
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

}  // namespace foldsim
