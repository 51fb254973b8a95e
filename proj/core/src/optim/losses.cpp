#include "oarseg/optim/losses.hpp"

#include "oarseg/errors.hpp"

namespace oarseg {
namespace {

void check_inputs(const torch::Tensor& logits, const torch::Tensor& target) {
  if (logits.dim() < 3) throw ShapeMismatch("logits must be B x C x spatial");
  if (target.dim() != logits.dim() - 1) {
    throw ShapeMismatch("target rank " + std::to_string(target.dim()) + " does not match logits rank " +
                        std::to_string(logits.dim()));
  }
  if (target.size(0) != logits.size(0)) throw ShapeMismatch("batch sizes of logits and target differ");
  for (int64_t d = 1; d < target.dim(); ++d) {
    if (target.size(d) != logits.size(d + 1)) throw ShapeMismatch("spatial extents of logits and target differ");
  }
  if (target.scalar_type() != torch::kLong) throw ShapeMismatch("target must be an int64 label tensor");
  if (target.numel() > 0) {
    const auto lo = target.min().item<int64_t>();
    const auto hi = target.max().item<int64_t>();
    if (lo < 0 || hi >= logits.size(1)) {
      throw LabelOutOfRange("target labels span [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] but there are " + std::to_string(logits.size(1)) + " classes");
    }
  }
}

}  // namespace

void LossConfig::validate() const {
  if (dice_weight < 0.0 || ce_weight < 0.0) throw InvalidConfig("loss weights must be nonnegative");
  if (!(dice_weight + ce_weight > 0.0)) throw InvalidConfig("at least one loss weight must be positive");
  if (!(smooth > 0.0)) throw InvalidConfig("dice smoothing must be positive");
}

void to_json(nlohmann::json& j, const LossConfig& c) {
  j = nlohmann::json{{"dice_weight", c.dice_weight},
                     {"ce_weight", c.ce_weight},
                     {"smooth", c.smooth},
                     {"include_background", c.include_background}};
}

void from_json(const nlohmann::json& j, LossConfig& c) {
  if (j.contains("dice_weight")) c.dice_weight = j.at("dice_weight").get<double>();
  if (j.contains("ce_weight")) c.ce_weight = j.at("ce_weight").get<double>();
  if (j.contains("smooth")) c.smooth = j.at("smooth").get<double>();
  if (j.contains("include_background")) c.include_background = j.at("include_background").get<bool>();
  c.validate();
}

torch::Tensor dice_loss(const torch::Tensor& logits, const torch::Tensor& target, const LossConfig& cfg) {
  check_inputs(logits, target);
  const auto classes = logits.size(1);
  const int64_t first = cfg.include_background ? 0 : 1;
  if (first >= classes) throw InvalidConfig("dice loss has no class to score");

  const auto probs = torch::softmax(logits, 1);
  // B x spatial x C -> B x C x spatial
  auto one_hot = torch::one_hot(target, classes).to(logits.scalar_type()).movedim(-1, 1);

  std::vector<int64_t> reduce{0};
  for (int64_t d = 2; d < logits.dim(); ++d) reduce.push_back(d);
  const auto intersection = (probs * one_hot).sum(reduce);
  const auto denominator = probs.sum(reduce) + one_hot.sum(reduce);
  const auto per_class = (2.0 * intersection + cfg.smooth) / (denominator + cfg.smooth);
  return 1.0 - per_class.slice(0, first, classes).mean();
}

torch::Tensor ce_loss(const torch::Tensor& logits, const torch::Tensor& target) {
  check_inputs(logits, target);
  return torch::nn::functional::cross_entropy(logits, target);
}

torch::Tensor combined_loss(const torch::Tensor& logits, const torch::Tensor& target, const LossConfig& cfg) {
  cfg.validate();
  if (cfg.ce_weight == 0.0) {
    auto d = dice_loss(logits, target, cfg);
    return cfg.dice_weight == 1.0 ? d : cfg.dice_weight * d;
  }
  if (cfg.dice_weight == 0.0) {
    auto c = ce_loss(logits, target);
    return cfg.ce_weight == 1.0 ? c : cfg.ce_weight * c;
  }
  return cfg.dice_weight * dice_loss(logits, target, cfg) + cfg.ce_weight * ce_loss(logits, target);
}

}  // namespace oarseg
