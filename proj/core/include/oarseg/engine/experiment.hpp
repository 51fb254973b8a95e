#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oarseg/data/dataset_spec.hpp"
#include "oarseg/data/split.hpp"
#include "oarseg/data/transforms.hpp"
#include "oarseg/model/config.hpp"
#include "oarseg/optim/losses.hpp"
#include "oarseg/optim/scheduler.hpp"

namespace oarseg {

/// baseline: DICE loss only with a constant learning rate.
/// enhanced: DICE 0.4 + CE 0.6 with the exp_range cyclic schedule (0.001 -> 0.006).
/// custom: whatever the configuration says.
enum class RunMode { baseline, enhanced, custom };

std::string_view to_string(RunMode m);
RunMode run_mode_from_string(std::string_view s);

struct DatasetRef {
  DatasetName name = DatasetName::synthetic;
  std::filesystem::path root;
  SplitRatios ratios = kDefaultSplitRatios;

  DatasetSpec spec() const { return dataset_spec(name); }
};

struct ExperimentConfig {
  DatasetRef dataset;
  ModelConfig model;
  LossConfig loss;
  SchedulerConfig scheduler;
  AugmentationConfig augmentation;
  std::int64_t epochs = 300;
  std::optional<std::int64_t> batch_size;  // default: 2 for 3D patches, 16 for 2D slices
  std::optional<Shape3> patch_size = Shape3{64, 128, 128};  // nullopt = full volume
  double foreground_prob = 0.5;  // share of patches centred on foreground
  std::uint64_t seed = 0;
  std::string run_name = "run";
  RunMode mode = RunMode::enhanced;

  std::int64_t effective_batch_size() const;

  /// Throws InvalidConfig when a field is out of range or the loss / scheduler
  /// contradict the run mode.
  void validate() const;

  /// Config of `mode` with the mode's loss and scheduler filled in.
  static ExperimentConfig for_mode(RunMode mode);
};

/// Forces the loss and scheduler a mode prescribes (custom is left untouched).
void apply_mode(ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Parses a config document. Missing sections take mode defaults; an explicit loss or
/// scheduler that contradicts the mode is rejected. model.num_classes defaults to the
/// dataset's class count. The result is validated.
ExperimentConfig experiment_from_json(const nlohmann::json& j);

ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when possible
/// and kept as a string otherwise. Throws InvalidConfig for malformed overrides.
void apply_override(nlohmann::json& doc, std::string_view assignment);

}  // namespace oarseg
