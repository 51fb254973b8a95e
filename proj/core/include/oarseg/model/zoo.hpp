#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oarseg/model/config.hpp"
#include "oarseg/model/networks.hpp"

namespace oarseg {

/// A built segmentation network plus its configuration. Copies share parameters.
class Model {
 public:
  Model(ModelConfig cfg, std::shared_ptr<nn::SegmentationNetImpl> net);

  const ModelConfig& config() const { return config_; }

  /// Logits B x num_classes x spatial at input resolution. Throws ShapeError when the
  /// rank or channel count is wrong or a spatial extent is not a multiple of 2^depth.
  torch::Tensor forward(const torch::Tensor& batch);
  /// Every logit head (deep supervision); the primary prediction is last.
  std::vector<torch::Tensor> forward_heads(const torch::Tensor& batch);

  std::int64_t parameter_count() const;
  std::vector<torch::Tensor> parameters() const { return net_->parameters(); }

  void train(bool on = true) { net_->train(on); }
  void eval() { net_->eval(); }

  nn::SegmentationNetImpl& net() { return *net_; }
  const nn::SegmentationNetImpl& net() const { return *net_; }

 private:
  ModelConfig config_;
  std::shared_ptr<nn::SegmentationNetImpl> net_;
};

/// Validates `cfg` and builds an initialised network (seed torch beforehand for
/// reproducible weights). Throws InvalidConfig.
Model build_model(const ModelConfig& cfg);

/// Throws ShapeError unless `batch` fits the model input contract.
void check_input(const ModelConfig& cfg, const torch::Tensor& batch);

std::int64_t parameter_count(const Model& m);

struct ConvInfo {
  std::string path;
  nn::ConvSpec spec;
};

/// Every convolution, keyed by its stable module path (e.g. "encoder.level3.0.conv1").
std::vector<ConvInfo> conv_layers(const Model& m);

/// Module path prefix of encoder level `level` ("encoder.level<level>.").
std::string encoder_level_path(std::int64_t level);

}  // namespace oarseg
