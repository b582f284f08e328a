// Serial reference vs OpenMP kernels. Arg 0 is the thread count passed to
// the parallel version (0 = OpenMP default).
#include <benchmark/benchmark.h>

#include "cyclic/kernels.hpp"
#include "cyclic/model_file.hpp"
#include "cyclic/null_models.hpp"
#include "cyclic/rng.hpp"

using namespace cyclic;

namespace {

const MarkerMatrix& matrix() {
  static const MarkerMatrix x =
      simulate(load_null_model(CYCLICSHIFT_DATA_DIR "/specs/markov5.txt"), 20, 2000, 1);
  return x;
}

std::vector<std::vector<double>> weights(std::size_t n, std::size_t m) {
  std::vector<std::vector<double>> w(n, std::vector<double>(m));
  CounterStream rng(3, StreamDomain::derive, 0);
  for (auto& row : w) {
    for (auto& v : row) v = 2.0 * rng.next_open_unit();
  }
  return w;
}

constexpr std::uint64_t kShifts = 2000;

void BM_null_serial(benchmark::State& state) {
  const auto src = kernels::random_shifts(7, matrix().cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::evaluate_null_serial(matrix(), LocalStatistic::sum(), GlobalStatistic::max, kShifts, src));
  }
  state.SetItemsProcessed(state.iterations() * kShifts);
}

void BM_null_parallel(benchmark::State& state) {
  const auto src = kernels::random_shifts(7, matrix().cols());
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::evaluate_null_parallel(matrix(), LocalStatistic::sum(), GlobalStatistic::max,
                                                             kShifts, src, threads));
  }
  state.SetItemsProcessed(state.iterations() * kShifts);
}

void BM_weights_serial(benchmark::State& state) {
  const auto w = weights(4, 500);
  const auto src = kernels::random_shifts(7, 500);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::averaged_weights_serial(w, kShifts, src));
  state.SetItemsProcessed(state.iterations() * kShifts);
}

void BM_weights_parallel(benchmark::State& state) {
  const auto w = weights(4, 500);
  const auto src = kernels::random_shifts(7, 500);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::averaged_weights_parallel(w, kShifts, src, threads));
  state.SetItemsProcessed(state.iterations() * kShifts);
}

}  // namespace

BENCHMARK(BM_null_serial)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_null_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weights_serial)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weights_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
