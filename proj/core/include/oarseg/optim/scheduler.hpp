#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace oarseg {

enum class LrPolicy { constant, triangular, triangular2, exp_range };

std::string_view to_string(LrPolicy p);
LrPolicy lr_policy_from_string(std::string_view s);

/// Cyclic learning-rate schedule, stepped once per optimizer iteration.
struct SchedulerConfig {
  LrPolicy policy = LrPolicy::exp_range;
  double base_lr = 0.001;
  double max_lr = 0.006;
  std::int64_t step_size = 0;  // iterations per half cycle; 0 = 2 x iterations per epoch
  double gamma = 0.9998;       // exp_range decay per iteration

  void validate() const;  // throws InvalidConfig
};

void to_json(nlohmann::json& j, const SchedulerConfig& c);
void from_json(const nlohmann::json& j, SchedulerConfig& c);

/// Closed form: cycle = floor(1 + t / (2 s)), x = |t / s - 2 cycle + 1|,
/// lr = base + (max - base) * max(0, 1 - x) * scale with scale 1 (triangular),
/// 2^(1 - cycle) (triangular2) or gamma^t (exp_range). `constant` returns base_lr.
double lr_at(const SchedulerConfig& cfg, std::int64_t iteration);

using LrTrace = std::vector<std::pair<std::int64_t, double>>;

LrTrace lr_trace(const SchedulerConfig& cfg, std::int64_t iterations);

/// CSV with header `iteration,lr`; values printed with round-trip precision.
void write_lr_trace(const std::filesystem::path& path, const LrTrace& trace);
LrTrace read_lr_trace(const std::filesystem::path& path);

}  // namespace oarseg
