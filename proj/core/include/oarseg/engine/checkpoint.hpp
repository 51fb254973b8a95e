#pragma once

#include <filesystem>
#include <optional>
#include <utility>

#include "oarseg/engine/state.hpp"
#include "oarseg/model/zoo.hpp"

namespace oarseg {

/// Binary checkpoint: magic, JSON header (model config, training summary, tensor index),
/// raw tensor bytes and a trailing CRC-32. Written atomically.
void save_checkpoint(const Model& m, const TrainState& state, const std::filesystem::path& path);

struct LoadedCheckpoint {
  Model model;
  TrainState state;  // lr trace not included
};

/// Throws CorruptCheckpoint for truncated or altered files and ConfigMismatch when
/// `expected` is given and differs from the stored model configuration.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const std::optional<ModelConfig>& expected = std::nullopt);

/// Model configuration stored in a checkpoint, without materialising the weights.
ModelConfig peek_checkpoint_config(const std::filesystem::path& path);

}  // namespace oarseg
