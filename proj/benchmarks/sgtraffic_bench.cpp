// Hot kernels: Galerkin products, one macro step, one BGK step, micro rhs.

#include <benchmark/benchmark.h>

#include <memory>

#include "sgtraffic/kinetic.hpp"
#include "sgtraffic/macro.hpp"
#include "sgtraffic/micro.hpp"

using namespace sgtraffic;

namespace {

std::shared_ptr<const Basis> haar(int K) {
  return std::make_shared<const Basis>(build_basis({BasisFamily::haar, K, 0}));
}

void BM_GalerkinProduct(benchmark::State& state) {
  const auto b = haar(static_cast<int>(state.range(0)));
  const TripleProductTensor t = compute_triple_tensor(b);
  const Vector u = project_function([](double xi) { return 0.75 + 0.2 * xi; }, *b);
  const Vector z = project_function([](double xi) { return 0.3 - 0.1 * xi * xi; }, *b);
  for (auto _ : state) benchmark::DoNotOptimize(galerkin_product(u, z, t));
}
BENCHMARK(BM_GalerkinProduct)->Arg(1)->Arg(7)->Arg(15)->Arg(31);

void BM_MacroStep(benchmark::State& state) {
  const auto b = haar(static_cast<int>(state.range(0)));
  const TripleProductTensor t = compute_triple_tensor(b);
  MacroGrid grid;
  const MacroModelSpec spec;
  const MacroField f = init_riemann(grid, spec, *b, RiemannData{});
  const double dt = stable_time_step(f, grid, spec, *b);
  for (auto _ : state) benchmark::DoNotOptimize(fv_step(f, grid, spec, t, dt));
}
BENCHMARK(BM_MacroStep)->Arg(3)->Arg(15)->Unit(benchmark::kMicrosecond);

void BM_BgkStep(benchmark::State& state) {
  const auto b = haar(static_cast<int>(state.range(0)));
  const TripleProductTensor t = compute_triple_tensor(b);
  KineticGrid grid;
  grid.cells = 100;
  grid.velocity_cells = 20;
  const MacroField init = init_riemann(MacroGrid{grid.a, grid.b, grid.cells}, MacroModelSpec{}, *b, RiemannData{});
  const KineticField f = equilibrium_field(init.rho, grid, *b);
  const double dt = 0.4 * grid.dx() / (grid.w_max + hesitation_bound(init.rho, grid, *b));
  for (auto _ : state) benchmark::DoNotOptimize(bgk_step(f, grid, t, dt));
}
BENCHMARK(BM_BgkStep)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_MicroRhs(benchmark::State& state) {
  const auto b = haar(7);
  const TripleProductTensor t = compute_triple_tensor(b);
  MicroParams p;
  p.vehicles = static_cast<int>(state.range(0));
  p.length = 0.2;
  MicroState s = make_platoon(p.vehicles, 0.0, 0.5, 0.1, *b);
  s.velocities = Matrix::Zero(p.vehicles, b->size());
  for (auto _ : state) benchmark::DoNotOptimize(micro_rhs_second_order(s, p, t));
}
BENCHMARK(BM_MicroRhs)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
