#include <benchmark/benchmark.h>

#include <random>

#include "oarseg/metrics/overlap.hpp"

using namespace oarseg;

namespace {

Grid3<Label> ball(std::int64_t n, double cz, double cy, double cx, double r) {
  Grid3<Label> g(Shape3{n, n, n});
  for (std::int64_t z = 0; z < n; ++z)
    for (std::int64_t y = 0; y < n; ++y)
      for (std::int64_t x = 0; x < n; ++x) {
        const double dz = z - cz, dy = y - cy, dx = x - cx;
        if (dz * dz + dy * dy + dx * dx <= r * r) g(z, y, x) = 1;
      }
  return g;
}

void BM_Hd95(benchmark::State& state) {
  const auto n = state.range(0);
  const auto a = ball(n, n / 2.0, n / 2.0, n / 2.0, n / 4.0);
  const auto b = ball(n, n / 2.0 + 1, n / 2.0, n / 2.0 - 2, n / 4.0 + 1);
  for (auto _ : state) benchmark::DoNotOptimize(hd95(a, b, 1, {2.5, 1.0, 1.0}));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_Hd95)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Dice(benchmark::State& state) {
  const auto n = state.range(0);
  const auto a = ball(n, n / 2.0, n / 2.0, n / 2.0, n / 4.0);
  const auto b = ball(n, n / 2.0 + 1, n / 2.0, n / 2.0, n / 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(dice_score(a, b, 1));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_Dice)->Arg(64)->Arg(128);

}  // namespace
