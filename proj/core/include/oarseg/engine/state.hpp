#pragma once

#include <cstdint>
#include <optional>

#include <nlohmann/json.hpp>

#include "oarseg/engine/run_files.hpp"
#include "oarseg/optim/scheduler.hpp"

namespace oarseg {

struct BestEpoch {
  std::int64_t epoch = -1;
  double val_dice = 0.0;
};

struct TrainState {
  std::int64_t epochs_completed = 0;
  std::int64_t iteration = 0;     // optimizer steps taken
  std::int64_t step_size = 0;     // resolved scheduler half-cycle
  LrTrace lr_trace;               // lr applied before each step
  Curves curves;
  ClassDiceTable class_dice;
  std::optional<BestEpoch> best;  // absent without a validation split or epochs
};

/// Summary without the per-iteration lr trace.
nlohmann::json to_json(const TrainState& s);
TrainState train_state_from_json(const nlohmann::json& j);

}  // namespace oarseg
