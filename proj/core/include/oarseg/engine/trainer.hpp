#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oarseg/data/split.hpp"
#include "oarseg/data/volume.hpp"
#include "oarseg/engine/experiment.hpp"
#include "oarseg/engine/inference.hpp"
#include "oarseg/engine/state.hpp"
#include "oarseg/metrics/report.hpp"
#include "oarseg/model/zoo.hpp"

namespace oarseg {

struct EpochReport {
  std::int64_t epoch = 0;
  double train_loss = 0.0;
  double train_dice = 0.0;
  std::optional<double> val_loss;
  std::optional<double> val_dice;
  double lr = 0.0;        // last learning rate applied
  double seconds = 0.0;   // wall time of the epoch
  bool improved = false;  // new best checkpoint written
};

struct FitOptions {
  std::filesystem::path runs_root = "runs";
  /// Written to config.json; defaults to the serialised experiment config.
  nlohmann::json config_document;
  std::function<void(const EpochReport&)> on_epoch;
  std::int64_t max_nonfinite = 10;  // consecutive non-finite losses before giving up
};

/// Trains `cfg` and writes runs/<run_name>/ (config.json, split.json, curves.csv,
/// class_dice.csv, lr_trace.csv, best.ckpt, last.ckpt). Validation runs after every
/// epoch; best.ckpt holds the epoch with the highest validation mean DICE. Throws
/// DivergenceError after `max_nonfinite` consecutive non-finite losses.
TrainState fit(const ExperimentConfig& cfg, const FitOptions& opt = {});

/// Seeded split of the patients under the dataset root.
SplitAssignment resolve_split(const ExperimentConfig& cfg);

/// Loads the patients of one split at native resolution, in split order.
std::vector<LabeledVolume> load_split(const ExperimentConfig& cfg, SplitName split);

/// Intensity normalisation used for evaluation (no crop, no augmentation).
Grid3<float> normalize_for_inference(const Volume& v, const AugmentationConfig& aug);

InferenceOptions inference_options(const ExperimentConfig& cfg);

struct Evaluation {
  std::vector<std::string> patient_ids;
  std::vector<CaseRecord> cases;
  double mean_loss = 0.0;
  MetricsReport report;  // rows in the dataset's table order
};

/// Runs inference on `items` and scores the argmax predictions.
Evaluation evaluate_model(Model& model, const std::vector<LabeledVolume>& items, const ExperimentConfig& cfg,
                          bool with_hd95);

/// Loads a checkpoint and scores it on one split. Throws ConfigMismatch when the
/// checkpoint's class count differs from the dataset's.
Evaluation evaluate_checkpoint(const std::filesystem::path& checkpoint, SplitName split,
                               const ExperimentConfig& cfg, bool with_hd95 = true);

/// Organ display names of `spec` in table order.
std::vector<std::string> table_organs(const DatasetSpec& spec);

}  // namespace oarseg
