#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hplateau/boundary_data.hpp"
#include "hplateau/group_algebra.hpp"
#include "hplateau/pharmonic.hpp"
#include "hplateau/plateau.hpp"
#include "hplateau/rng.hpp"

using namespace hplateau;

namespace {

std::vector<Vec3> sphere_points(int count, std::uint64_t seed) {
  CounterRng rng(seed, "bench");
  std::vector<Vec3> pts;
  for (int i = 0; i < count; ++i) pts.push_back(Vec3(rng.normal(), rng.normal(), rng.normal()).normalized());
  return pts;
}

void BM_SingularEnergyS3xZ4(benchmark::State& state) {
  const FiniteGroup g = FiniteGroup::direct_product(FiniteGroup::symmetric3(), FiniteGroup::cyclic(4));
  std::vector<double> l(g.class_count(), 0.0);
  for (int c = 1; c < g.class_count(); ++c) l[c] = 1.0 + 0.1 * std::min(c, g.inverse_class(c));
  const LengthSpectrum spec = LengthSpectrum::create(g, l);
  for (auto _ : state) benchmark::DoNotOptimize(class_energy_table(g, spec, 1.6));
}
BENCHMARK(BM_SingularEnergyS3xZ4);

void BM_Matching(benchmark::State& state) {
  const auto pts = sphere_points(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(minimal_connection_matching(pts, 1.0));
}
BENCHMARK(BM_Matching)->Arg(6)->Arg(10)->Arg(14);

void BM_PositionOptimizer(benchmark::State& state) {
  const FiniteGroup z3 = FiniteGroup::cyclic(3);
  const EnergyTable t = class_energy_table(z3, LengthSpectrum::create(z3, {0.0, 2.0, 2.0}), 2.0);
  const auto pts = sphere_points(3, 2);
  const Topology top{3, 1, {{0, 3, 1}, {1, 3, 1}, {2, 3, 1}}};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_positions(top, pts, t));
}
BENCHMARK(BM_PositionOptimizer);

void BM_EnergyGradient(benchmark::State& state) {
  const BoundaryField f = rp2_pair_datum(Vec3(0, 0, -1), Vec3(0, 0, 1), Domain::ball(Vec3::Zero(), 1.0),
                                         static_cast<int>(state.range(0)));
  std::vector<double> grad;
  for (auto _ : state) benchmark::DoNotOptimize(p_energy_gradient(f.grid, 1.8, grad));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.grid.node_count()));
}
BENCHMARK(BM_EnergyGradient)->Arg(16)->Arg(24)->Arg(32);

}  // namespace
BENCHMARK_MAIN();
