#pragma once

#include <torch/torch.h>

#include <nlohmann/json.hpp>

namespace oarseg {

/// Weighted DICE + cross-entropy. Defaults are the tuned 0.4 / 0.6 weighting.
struct LossConfig {
  double dice_weight = 0.4;
  double ce_weight = 0.6;
  double smooth = 1e-5;
  bool include_background = false;  // for the DICE term only

  void validate() const;  // throws InvalidConfig
  bool dice_only() const { return ce_weight == 0.0 && dice_weight > 0.0; }
};

void to_json(nlohmann::json& j, const LossConfig& c);
void from_json(const nlohmann::json& j, LossConfig& c);

// All losses take logits B x C x spatial... and integer targets B x spatial... with
// values in [0, C). They throw ShapeMismatch / LabelOutOfRange on bad inputs.

/// 1 - macro mean over the included classes of (2 sum(p t) + s) / (sum p + sum t + s),
/// with p = softmax(logits) and t = one-hot(target); sums run over batch and space.
torch::Tensor dice_loss(const torch::Tensor& logits, const torch::Tensor& target, const LossConfig& cfg);

/// Mean per-voxel categorical cross-entropy.
torch::Tensor ce_loss(const torch::Tensor& logits, const torch::Tensor& target);

/// dice_weight * dice_loss + ce_weight * ce_loss; a zero-weighted term is not evaluated.
torch::Tensor combined_loss(const torch::Tensor& logits, const torch::Tensor& target, const LossConfig& cfg);

}  // namespace oarseg
