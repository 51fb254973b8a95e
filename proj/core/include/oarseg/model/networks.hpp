#pragma once

#include <memory>
#include <vector>

#include "oarseg/model/layers.hpp"

namespace oarseg::nn {

/// Downsampling path. Produces one feature map per level 0..depth, where level i has
/// spatial extent input / 2^i and `channels()[i]` channels; the last level is the
/// bottleneck. Stages are registered as "level0".."level<depth>".
class EncoderImpl : public torch::nn::Module {
 public:
  explicit EncoderImpl(const ModelConfig& cfg);
  std::vector<torch::Tensor> forward(const torch::Tensor& x);
  const std::vector<std::int64_t>& channels() const { return channels_; }

 private:
  std::vector<Stage> levels_;
  std::vector<std::int64_t> channels_;
};
TORCH_MODULE(Encoder);

/// Dilation used by encoder level `level` (the two deepest stages and the bottleneck).
std::int64_t level_dilation(const ModelConfig& cfg, std::int64_t level);

/// Network with one or more logit heads at input resolution.
class SegmentationNetImpl : public torch::nn::Module {
 public:
  /// All heads; the primary prediction is the last element.
  virtual std::vector<torch::Tensor> forward_heads(const torch::Tensor& x) = 0;
};

/// U-shaped decoder with one skip connection per level (U-Net / ResU-Net family).
class UNetImpl : public SegmentationNetImpl {
 public:
  explicit UNetImpl(const ModelConfig& cfg);
  std::vector<torch::Tensor> forward_heads(const torch::Tensor& x) override;

 private:
  Encoder encoder_{nullptr};
  std::vector<std::shared_ptr<ConvImpl>> up_;
  std::vector<std::shared_ptr<BlockImpl>> decode_;
  std::shared_ptr<ConvImpl> head_;
};

/// U-Net++: nested, dense skip pathways; node (i, j) sees every earlier node on row i
/// plus the upsampled node (i+1, j-1). With deep supervision every X(0, j) gets a head.
class UNetPlusPlusImpl : public SegmentationNetImpl {
 public:
  explicit UNetPlusPlusImpl(const ModelConfig& cfg);
  std::vector<torch::Tensor> forward_heads(const torch::Tensor& x) override;

 private:
  std::int64_t depth_;
  bool deep_supervision_;
  Encoder encoder_{nullptr};
  // indexed [i][j] for j >= 1
  std::vector<std::vector<std::shared_ptr<ConvImpl>>> up_;
  std::vector<std::vector<std::shared_ptr<BlockImpl>>> nodes_;
  std::vector<std::shared_ptr<ConvImpl>> heads_;
};

}  // namespace oarseg::nn
