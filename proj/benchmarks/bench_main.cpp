#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "multimax/banding.hpp"
#include "multimax/fairness.hpp"
#include "multimax/prediction.hpp"

namespace {

using namespace multimax;

// splitmix64; enough for synthetic inputs.
std::uint64_t next(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> ids(std::size_t n, char prefix) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Runs are noisy copies of one base vector so that bands are large.
RunCatalog synthetic(std::size_t runs, std::size_t instances, std::uint64_t seed) {
  auto index = make_index("validation", ids(instances, 'v'));
  std::vector<BinaryClass> labels(instances);
  std::vector<BinaryClass> base(instances);
  for (std::size_t i = 0; i < instances; ++i) {
    labels[i] = next(seed) & 1U;
    base[i] = (next(seed) % 10 == 0) ? labels[i] ^ 1U : labels[i];
  }
  LabelVector lv(index, labels);
  std::vector<ModelRun> out;
  out.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    auto v = base;
    for (auto& b : v) {
      if (next(seed) % 50 == 0) b ^= 1U;
    }
    PredictionVector pv(index, v);
    out.push_back(ModelRun::evaluate("r" + std::to_string(r), "bench", pv, pv, lv));
  }
  return RunCatalog(std::move(lv), std::move(out));
}

PerformanceBand whole(const RunCatalog& catalog) {
  PerformanceBand band;
  band.label = "all";
  for (const auto& run : catalog.runs()) band.run_ids.push_back(run.id());
  std::sort(band.run_ids.begin(), band.run_ids.end());
  band.epsilon = catalog.runs().front().utility();
  return band;
}

void BM_PartitionRounded(benchmark::State& state) {
  const auto catalog = synthetic(static_cast<std::size_t>(state.range(0)), 1000, 1);
  const auto policy = BandingPolicy::rounded(2);
  for (auto _ : state) benchmark::DoNotOptimize(partition(catalog, policy));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PartitionRounded)->Arg(100)->Arg(1000)->Arg(5000);

void BM_PartitionStrict(benchmark::State& state) {
  const auto catalog = synthetic(static_cast<std::size_t>(state.range(0)), 1000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(partition(catalog, BandingPolicy::strict()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PartitionStrict)->Arg(1000)->Arg(5000);

void BM_Disputable(benchmark::State& state) {
  const auto catalog = synthetic(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 3);
  const auto band = whole(catalog);
  for (auto _ : state) benchmark::DoNotOptimize(disputable_instances(band, catalog));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_Disputable)->Args({100, 1000})->Args({1000, 1000})->Args({500, 10000});

void BM_Discrepancy(benchmark::State& state) {
  const auto catalog = synthetic(static_cast<std::size_t>(state.range(0)), 2000, 4);
  const auto band = whole(catalog);
  const DiscrepancyOptions options{static_cast<std::size_t>(state.range(1)), 7,
                                   static_cast<unsigned>(state.range(2))};
  for (auto _ : state) benchmark::DoNotOptimize(discrepancy(band, catalog, options));
}
BENCHMARK(BM_Discrepancy)
    ->Args({100, 100, 1})
    ->Args({1000, 200, 1})
    ->Args({1000, 200, 4})
    ->Unit(benchmark::kMillisecond);

void BM_FairEnsemble(benchmark::State& state) {
  const auto catalog = synthetic(static_cast<std::size_t>(state.range(0)), 2000, 5);
  const auto band = whole(catalog);
  for (auto _ : state) benchmark::DoNotOptimize(fair_ensemble(band, catalog));
}
BENCHMARK(BM_FairEnsemble)->Arg(100)->Arg(1000);

void BM_UniqueVectors(benchmark::State& state) {
  const auto catalog = synthetic(static_cast<std::size_t>(state.range(0)), 2000, 6);
  const auto band = whole(catalog);
  for (auto _ : state) benchmark::DoNotOptimize(unique_prediction_vectors(band, catalog));
}
BENCHMARK(BM_UniqueVectors)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
