#include <benchmark/benchmark.h>

#include "oarseg/model/zoo.hpp"

using namespace oarseg;

namespace {

void BM_Forward(benchmark::State& state) {
  torch::manual_seed(0);
  const auto variant = static_cast<Variant>(state.range(0));
  auto cfg = ModelConfig::for_variant(variant, 4);
  cfg.base_width = 8;
  cfg.depth = 3;
  auto model = build_model(cfg);
  model.eval();
  const auto x = cfg.dims() == 3 ? torch::randn({1, 1, 32, 32, 32}) : torch::randn({8, 1, 64, 64});
  torch::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x).data_ptr());
  state.SetLabel(std::string(to_string(variant)));
}
BENCHMARK(BM_Forward)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace
