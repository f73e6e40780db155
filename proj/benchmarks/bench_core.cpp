#include <benchmark/benchmark.h>

#include <cmath>

#include "foldsim/energy.hpp"
#include "foldsim/flow.hpp"
#include "foldsim/geometry.hpp"
#include "foldsim/hessian.hpp"
#include "foldsim/mesh.hpp"

namespace {

using namespace foldsim;

void BM_ClosestPoint(benchmark::State& state) {
  const FoldCurve arc = make_parabolic_arc(Vec2(0.0, 2.0), Vec2(9.6, 2.0),
                                           Vec2(4.8, 6.0));
  double t = 0.0;
  int i = 0;
  for (auto _ : state) {
    const Vec2 p(0.1 * (i % 97), 0.07 * (i % 131));
    benchmark::DoNotOptimize(t += arc.closest_point(p).t);
    ++i;
  }
}
BENCHMARK(BM_ClosestPoint);

void BM_HessianAssembly(benchmark::State& state) {
  const FoldMesh mesh =
      build_rect_mesh(4.0, 4.0, 4.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    HessianOperator op(mesh);
    benchmark::DoNotOptimize(op.scalar_op().nonZeros());
  }
  state.SetLabel(std::to_string(mesh.num_elements()) + " elements");
}
BENCHMARK(BM_HessianAssembly)->Arg(8)->Arg(16);

void BM_EnergyAssembly(benchmark::State& state) {
  const FoldMesh mesh =
      build_rect_mesh(4.0, 4.0, 4.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    EnergyModel model(mesh, EnergyParams{}, {});
    benchmark::DoNotOptimize(model.matrix().nonZeros());
  }
  state.SetLabel(std::to_string(mesh.num_elements()) + " elements");
}
BENCHMARK(BM_EnergyAssembly)->Arg(8)->Arg(16);

void BM_FlowStep(benchmark::State& state) {
  const FoldMesh mesh =
      build_rect_mesh(4.0, 4.0, 4.0 / static_cast<double>(state.range(0)));
  const DGField y = interpolate(mesh, [](const Vec2& x) {
    return Vec3(std::sin(x.x()), x.y(), std::cos(x.x()));
  });
  FlowConfig fc;
  fc.tau = 0.01;
  FlowSystem sys(mesh, EnergyParams{}, {}, fc);
  for (auto _ : state) {
    const FlowStep st = sys.flow_step(y);
    benchmark::DoNotOptimize(st.step_norm);
  }
  state.SetLabel(std::to_string(mesh.num_elements()) + " elements");
}
BENCHMARK(BM_FlowStep)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
