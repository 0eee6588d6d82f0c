#include <losmap/los_map.hpp>
#include <losmap/network.hpp>
#include <losmap/scenario.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace losmap;

namespace {

void algebraic_connectivity(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<NodeId> ids(n);
  for (std::size_t i = 0; i < n; ++i)
    ids[i] = static_cast<NodeId>(i);
  network::AvailabilityMatrix a(ids);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      a.set(i, j, u(rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(network::connectivity(a).lambda2);
}
BENCHMARK(algebraic_connectivity)->RangeMultiplier(2)->Range(8, 128);

void los_map_build(benchmark::State& state)
{
  auto c = scenario::ScenarioConfig::defaults_for(scenario::ScenarioKind::intersection);
  c.density = static_cast<double>(state.range(0));
  c.cav_fraction = 0.5;
  const auto world = scenario::identify_roles(scenario::generate(c), c);
  for (auto _ : state)
  {
    const auto map = los_map::build(
      world, prediction::PredictionParams{}, channel::ChannelParams{}, los_map::SensingParams{}, 1);
    benchmark::DoNotOptimize(map.epoch_count());
  }
}
BENCHMARK(los_map_build)->Arg(30)->Arg(50)->Arg(70)->Unit(benchmark::kMillisecond);

} // namespace
