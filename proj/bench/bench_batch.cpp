#include <benchmark/benchmark.h>

#include "bilevel/batch.hpp"
#include "bilevel/case_studies.hpp"
#include "bilevel/frontier.hpp"

using namespace bilevel;

namespace {

std::vector<Vector> points(const BilevelInstance& inst, int n) { return lhs_sample(inst.leader_set(), n, 7); }

void BM_case2_serial(benchmark::State& state) {
  const auto inst = case2_instance();
  const auto xs = points(inst, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch_serial(inst, xs, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_case2_parallel(benchmark::State& state) {
  const auto inst = case2_instance();
  const auto xs = points(inst, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(inst, xs, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = batch_threads();
}

void BM_case1_serial(benchmark::State& state) {
  const auto inst = case1_instance();
  const auto xs = points(inst, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch_serial(inst, xs, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_case1_parallel(benchmark::State& state) {
  const auto inst = case1_instance();
  const auto xs = points(inst, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(inst, xs, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = batch_threads();
}

}  // namespace

BENCHMARK(BM_case1_serial)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_case1_parallel)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_case2_serial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_case2_parallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
