#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oarseg/engine/experiment.hpp"
#include "oarseg/engine/trainer.hpp"

namespace oarseg {

enum class AblationKind { loss_weights, scheduler, encoder };

std::string_view to_string(AblationKind k);
AblationKind ablation_kind_from_string(std::string_view s);

struct AblationArm {
  std::string label;
  ExperimentConfig cfg;  // custom mode, run_name <base>_<kind>_<slug>
};

/// loss_weights: (1,0) (0.8,0.2) (0.6,0.4) (0.5,0.5) (0.4,0.6) (0.2,0.8) (0,1).
/// scheduler: without cyclicLR, triangular, triangular2, exp_range.
/// encoder: resnet34_style, efficientnet_style.
std::vector<AblationArm> ablation_arms(AblationKind kind, const ExperimentConfig& base);

/// Keeps the arms whose labels appear in `labels` (all when empty). Throws InvalidConfig
/// for unknown labels.
std::vector<AblationArm> select_arms(std::vector<AblationArm> arms, const std::vector<std::string>& labels);

struct ArmResult {
  std::string label;
  std::string run_name;
  std::optional<double> overall_dice;  // absent when the arm failed
  std::optional<double> overall_hd95_mm;
  std::string error;
};

struct AblationReport {
  AblationKind kind = AblationKind::loss_weights;
  SplitName split = SplitName::test;
  std::vector<ArmResult> arms;  // arm order

  bool all_failed() const;
};

/// Fits and evaluates every arm; a failing arm is recorded and the others continue.
AblationReport run_ablation(AblationKind kind, const std::vector<AblationArm>& arms, const FitOptions& fit_opts,
                            SplitName split = SplitName::test,
                            const std::function<void(const ArmResult&)>& on_arm = {});

/// Wide table: one column per arm label, one "Overall DICE" row (and HD95 row).
std::string to_csv(const AblationReport& r);
/// Rank,Arm,DICE,HD95 sorted by DICE (failed arms last).
std::string ranked_csv(const AblationReport& r);
nlohmann::json to_json(const AblationReport& r);

}  // namespace oarseg
