#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "litcp/cp_als.hpp"

namespace {

litcp::SparseTensor random_tensor(std::size_t nnz) {
  std::mt19937_64 rng(7);
  const std::vector<std::size_t> shape{500, 5000, 300, 8000};
  std::uniform_real_distribution<double> value(0.5, 3.0);
  std::vector<litcp::SparseTensor::Entry> entries;
  entries.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::vector<litcp::Coord> c(shape.size());
    for (std::size_t m = 0; m < shape.size(); ++m) {
      c[m] = static_cast<litcp::Coord>(rng() % shape[m]);
    }
    entries.push_back({std::move(c), value(rng)});
  }
  return litcp::SparseTensor::from_entries(std::move(entries), shape);
}

const litcp::SparseTensor& tensor() {
  static const litcp::SparseTensor t = random_tensor(200000);
  return t;
}

void BM_Mttkrp(benchmark::State& state) {
  const auto& t = tensor();
  const auto rank = static_cast<std::size_t>(state.range(0));
  const auto threads = static_cast<unsigned>(state.range(1));
  const auto factors = litcp::init_factors(t.shape(), rank, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(litcp::mttkrp(t, factors, 3, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(t.nnz()));
}
BENCHMARK(BM_Mttkrp)
    ->ArgsProduct({{20, 100, 200}, {1, 4}})
    ->Unit(benchmark::kMillisecond);

void BM_CpAlsSweep(benchmark::State& state) {
  const auto& t = tensor();
  litcp::AlsOptions opts;
  opts.max_iters = 1;
  opts.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(litcp::cp_als(t, static_cast<std::size_t>(state.range(0)), opts));
  }
}
BENCHMARK(BM_CpAlsSweep)->ArgsProduct({{20, 100}, {1, 4}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
