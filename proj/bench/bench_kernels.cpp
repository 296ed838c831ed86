// Majority kernels by policy, and end-to-end cell-level GeMV with serial vs parallel tiles.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mvdram/encoder.hpp"
#include "mvdram/engine.hpp"
#include "mvdram/kernels.hpp"

using namespace mvdram;

namespace {

struct Rows {
  std::vector<std::vector<std::uint64_t>> data;
  std::vector<const std::uint64_t*> ptrs;
  std::vector<std::uint64_t> out;
};

Rows make_rows(std::size_t count, std::size_t words) {
  std::mt19937_64 rng(1);
  Rows r;
  r.data.assign(count, std::vector<std::uint64_t>(words));
  for (auto& row : r.data) {
    for (auto& w : row) w = rng();
    r.ptrs.push_back(row.data());
  }
  r.out.resize(words);
  return r;
}

void BM_Majority(benchmark::State& state, kernels::Policy policy) {
  const auto x = static_cast<std::size_t>(state.range(0));
  const auto columns = static_cast<std::size_t>(state.range(1));
  auto rows = make_rows(x, columns / 64);
  for (auto _ : state) {
    kernels::majority(policy, rows.ptrs, columns, rows.out.data());
    benchmark::DoNotOptimize(rows.out.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * x * columns / 8));
}

void majority_args(benchmark::internal::Benchmark* b) {
  for (int x : {3, 5, 9}) b->Args({x, 65536});
}

BENCHMARK_CAPTURE(BM_Majority, reference, kernels::Policy::Reference)->Args({3, 65536})->Args({5, 65536});
BENCHMARK_CAPTURE(BM_Majority, serial, kernels::Policy::Serial)->Apply(majority_args);
BENCHMARK_CAPTURE(BM_Majority, parallel, kernels::Policy::Parallel)->Apply(majority_args);

void BM_Gemv(benchmark::State& state, bool parallel) {
  const SubarrayGeometry geom{512, 4096};
  const std::vector<ReliabilityProfile> profiles{ReliabilityProfile::all_reliable(geom.column_count)};
  const GemvShape shape{1024, 1024, 4, 4};
  const auto p = plan(shape, geom, profiles);
  const auto w = QuantizedMatrix::random(shape.m, shape.n, shape.q_w, false, 1);
  const auto a = ActivationVector::random(shape.n, shape.q_a, false, 0.5, 2);
  TemplateStore store;
  ExecPolicy policy;
  policy.parallel_tiles = parallel;
  policy.kernel = parallel ? kernels::Policy::Parallel : kernels::Policy::Serial;
  for (auto _ : state) {
    auto run = run_gemv(p, w, a, EncodingMode::Sparse, profiles, store, policy);
    benchmark::DoNotOptimize(run.result.output.data());
  }
  state.counters["tiles"] = static_cast<double>(p.tiles.size());
}

BENCHMARK_CAPTURE(BM_Gemv, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gemv, parallel, true)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
