#include <losmap/relay.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace losmap;

namespace {

relay::AssignmentProblem problem(std::size_t links, std::size_t relays, unsigned capacity)
{
  std::mt19937_64 rng(links * 100 + relays);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<relay::RelayLink> l;
  for (std::size_t k = 0; k < links; ++k)
    l.push_back({static_cast<NodeId>(1000 + 2 * k), static_cast<NodeId>(1001 + 2 * k)});
  std::vector<relay::RelayNode> r;
  for (std::size_t k = 0; k < relays; ++k)
    r.push_back({static_cast<NodeId>(1 + k), capacity});
  std::vector<double> scores(links * relays);
  for (auto& s : scores)
    s = u(rng);
  return relay::AssignmentProblem(std::move(l), std::move(r), std::move(scores));
}

void exhaustive(benchmark::State& state)
{
  const auto p = problem(state.range(0), 3, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(relay::exhaustive_search(p).objective);
}
BENCHMARK(exhaustive)->DenseRange(2, 6);

void exhaustive_pruned(benchmark::State& state)
{
  const auto p = problem(state.range(0), 3, 2);
  const relay::ExhaustiveOptions opts{1e300, true};
  for (auto _ : state)
    benchmark::DoNotOptimize(relay::exhaustive_search(p, opts).objective);
}
BENCHMARK(exhaustive_pruned)->DenseRange(2, 6);

void hungarian(benchmark::State& state)
{
  const auto p = problem(state.range(0), state.range(0), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(relay::hungarian(p).objective);
}
BENCHMARK(hungarian)->RangeMultiplier(2)->Range(2, 64);

void fcfs(benchmark::State& state)
{
  const auto p = problem(state.range(0), state.range(0), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(relay::fcfs(p).objective);
}
BENCHMARK(fcfs)->RangeMultiplier(2)->Range(2, 64);

void admm(benchmark::State& state)
{
  const auto p = problem(state.range(0), state.range(0), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(relay::admm(p).objective);
}
BENCHMARK(admm)->RangeMultiplier(2)->Range(2, 32);

} // namespace
