#include <benchmark/benchmark.h>

#include <torch/torch.h>

#include "oarseg/optim/losses.hpp"
#include "oarseg/optim/scheduler.hpp"

using namespace oarseg;

namespace {

void BM_LrAt(benchmark::State& state) {
  SchedulerConfig cfg;
  cfg.policy = static_cast<LrPolicy>(state.range(0));
  cfg.step_size = 500;
  std::int64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lr_at(cfg, t++ % 10000));
}
BENCHMARK(BM_LrAt)->DenseRange(0, 3);

void BM_CombinedLossBackward(benchmark::State& state) {
  torch::manual_seed(0);
  const auto n = state.range(0);
  const auto logits = torch::randn({2, 4, n, n, n});
  const auto target = torch::randint(0, 4, {2, n, n, n}, torch::kInt64);
  const LossConfig cfg;
  for (auto _ : state) {
    auto x = logits.clone().set_requires_grad(true);
    combined_loss(x, target, cfg).backward();
    benchmark::DoNotOptimize(x.grad().data_ptr());
  }
}
BENCHMARK(BM_CombinedLossBackward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
