#include <benchmark/benchmark.h>

#include "dnflow/adjoint.hpp"
#include "dnflow/fields.hpp"
#include "dnflow/interpolation.hpp"
#include "dnflow/mesh.hpp"
#include "dnflow/objective.hpp"
#include "dnflow/state.hpp"

using namespace dnflow;

namespace {

const ChannelGeometry kChannel(1.0, 2.0, 2.0);

FlowProblem channel(int nx, int steps) {
  return FlowProblem(generate_channel_mesh(kChannel, nx, nx / 2), TimeGrid(1.0, steps));
}

Eigen::VectorXd w_velocity(const FlowProblem& problem, double scale) {
  const VectorField w = make_w_field(kChannel);
  return interpolate_velocity(problem.layout(), [&](const Point2& p) {
    const Vec2 v = w(p);
    return Vec2{scale * v[0], scale * v[1]};
  });
}

void BM_ConvectionAssembly(benchmark::State& st) {
  const FlowProblem problem = channel(static_cast<int>(st.range(0)), 1);
  const Eigen::VectorXd u = w_velocity(problem, 3.0);
  for (auto _ : st) benchmark::DoNotOptimize(problem.assembler().convection(u));
  st.counters["dofs"] = problem.layout().num_dofs();
}
BENCHMARK(BM_ConvectionAssembly)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_StepFactorization(benchmark::State& st) {
  const FlowProblem problem = channel(static_cast<int>(st.range(0)), 1);
  const Eigen::VectorXd u = w_velocity(problem, 3.0);
  for (auto _ : st) benchmark::DoNotOptimize(problem.step_jacobian(u, FlowModel::NavierStokes));
  st.counters["dofs"] = problem.layout().num_dofs();
}
BENCHMARK(BM_StepFactorization)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_StateSolve(benchmark::State& st) {
  const FlowProblem problem = channel(16, static_cast<int>(st.range(0)));
  const ControlVector q = ControlVector::constant({5.0, 0.0}, problem.grid().steps());
  const Eigen::VectorXd u0 = w_velocity(problem, 3.0);
  for (auto _ : st) benchmark::DoNotOptimize(problem.solve_state(q, u0));
}
BENCHMARK(BM_StateSolve)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AdjointSweep(benchmark::State& st) {
  const FlowProblem problem = channel(16, static_cast<int>(st.range(0)));
  const ControlVector q = ControlVector::constant({5.0, 0.0}, problem.grid().steps());
  const StateSolution s = problem.solve_state(q, w_velocity(problem, 3.0));
  std::vector<Eigen::VectorXd> targets(s.trajectory.velocity.size(), w_velocity(problem, 1.0));
  for (auto _ : st) {
    const LinearizedTrajectory lin(problem, s.trajectory);
    benchmark::DoNotOptimize(solve_tracking_adjoint(lin, targets));
  }
}
BENCHMARK(BM_AdjointSweep)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
