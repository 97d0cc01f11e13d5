// Serial vs OpenMP kernels on cell-division sized inputs.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "frapm/cell_division.hpp"
#include "frapm/kernels.hpp"

using namespace frapm;

namespace {

std::vector<Particle> particles(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> loc(0.0, 1.0), mass(0.0, 1e-6);
  std::vector<Particle> ps(n);
  for (auto& p : ps) p = {loc(rng), mass(rng)};
  return ps;
}

template <Backend B>
void BM_transport(benchmark::State& state) {
  const auto in = particles(static_cast<std::size_t>(state.range(0)));
  std::vector<Particle> out(in.size());
  for (auto _ : state) {
    transport(B, in, out, cell_division::growth, 1.5625e-3, 1);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Backend B>
void BM_sample_rate(benchmark::State& state) {
  const auto in = particles(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(in.size());
  for (auto _ : state) {
    sample(B, in, cell_division::beta_division, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Backend B>
void BM_grouped_forcing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t groups = 10000;
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> pick(0, groups - 1);
  std::vector<std::size_t> count(groups + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++count[pick(rng) + 1];
  for (std::size_t g = 0; g < groups; ++g) count[g + 1] += count[g];
  std::vector<double> w(n, 1e-6), r(n, 0.3);
  const std::vector<double> times{0.0, 7.8125e-4, 1.5625e-3};
  std::vector<double> out(groups * times.size());
  for (auto _ : state) {
    grouped_forcing(B, GroupedEntries{count, w, r}, times, -1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_transport<Backend::Serial>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_transport<Backend::Parallel>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_sample_rate<Backend::Serial>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_sample_rate<Backend::Parallel>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_grouped_forcing<Backend::Serial>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_grouped_forcing<Backend::Parallel>)->Arg(1 << 16)->Arg(1 << 20);

BENCHMARK_MAIN();
