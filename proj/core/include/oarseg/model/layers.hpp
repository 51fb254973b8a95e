#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <torch/torch.h>

#include "oarseg/model/config.hpp"

namespace oarseg::nn {

// Building blocks that work for 2D and 3D inputs alike; `dims` picks the
// dimensionality at construction time.

struct ConvSpec {
  std::int64_t dims = 2;
  std::int64_t in = 1;
  std::int64_t out = 1;
  std::int64_t kernel = 3;
  std::int64_t stride = 1;
  std::int64_t dilation = 1;
  std::int64_t groups = 1;
  bool bias = false;
  bool transposed = false;  // kernel == stride upsampling
};

/// Convolution with "same" padding (dilation * (kernel - 1) / 2) and He fan-in init.
class ConvImpl : public torch::nn::Module {
 public:
  explicit ConvImpl(const ConvSpec& spec);
  torch::Tensor forward(const torch::Tensor& x);
  const ConvSpec& spec() const { return spec_; }

 private:
  ConvSpec spec_;
  torch::Tensor weight_;
  torch::Tensor bias_;
};
TORCH_MODULE(Conv);

/// Instance or batch normalisation with affine scale (ones) and shift (zeros).
class NormImpl : public torch::nn::Module {
 public:
  NormImpl(NormKind kind, std::int64_t channels);
  torch::Tensor forward(const torch::Tensor& x);
  NormKind kind() const { return kind_; }

 private:
  NormKind kind_;
  torch::Tensor weight_;
  torch::Tensor bias_;
  torch::Tensor running_mean_;
  torch::Tensor running_var_;
};
TORCH_MODULE(Norm);

enum class Activation { relu, silu };

torch::Tensor activate(const torch::Tensor& x, Activation a);

/// Common interface for blocks that map C_in -> C_out channels.
class BlockImpl : public torch::nn::Module {
 public:
  virtual torch::Tensor forward(const torch::Tensor& x) = 0;
};

/// conv -> norm -> activation
class ConvNormActImpl : public BlockImpl {
 public:
  ConvNormActImpl(const ConvSpec& spec, NormKind norm, Activation act = Activation::relu);
  torch::Tensor forward(const torch::Tensor& x) override;

 private:
  Conv conv_{nullptr};
  Norm norm_{nullptr};
  Activation act_;
};
using ConvNormAct = std::shared_ptr<ConvNormActImpl>;

/// Two conv-norm-ReLU stages (the plain U-Net block).
class DoubleConvImpl : public BlockImpl {
 public:
  DoubleConvImpl(std::int64_t dims, std::int64_t in, std::int64_t out, NormKind norm, std::int64_t dilation = 1);
  torch::Tensor forward(const torch::Tensor& x) override;

 private:
  ConvNormAct first_{nullptr};
  ConvNormAct second_{nullptr};
};

/// Residual unit: relu(norm(conv(relu(norm(conv(x))))) + shortcut(x)); the shortcut
/// is a 1x1 projection plus norm when the channel count or stride changes.
class ResidualUnitImpl : public BlockImpl {
 public:
  ResidualUnitImpl(std::int64_t dims, std::int64_t in, std::int64_t out, NormKind norm, std::int64_t stride = 1,
                   std::int64_t dilation = 1);
  torch::Tensor forward(const torch::Tensor& x) override;

 private:
  Conv conv1_{nullptr};
  Norm norm1_{nullptr};
  Conv conv2_{nullptr};
  Norm norm2_{nullptr};
  Conv skip_conv_{nullptr};
  Norm skip_norm_{nullptr};
};

class SqueezeExciteImpl : public torch::nn::Module {
 public:
  SqueezeExciteImpl(std::int64_t dims, std::int64_t channels, std::int64_t reduced);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  Conv reduce_{nullptr};
  Conv expand_{nullptr};
};
TORCH_MODULE(SqueezeExcite);

/// Inverted bottleneck: 1x1 expand -> depthwise kxk -> squeeze-excite -> 1x1 project,
/// with an identity residual when shape is preserved.
class MBConvImpl : public BlockImpl {
 public:
  MBConvImpl(std::int64_t dims, std::int64_t in, std::int64_t out, NormKind norm, std::int64_t stride,
             std::int64_t expand_ratio, std::int64_t dilation = 1);
  torch::Tensor forward(const torch::Tensor& x) override;

 private:
  Conv expand_conv_{nullptr};
  Norm expand_norm_{nullptr};
  Conv depthwise_conv_{nullptr};
  Norm depthwise_norm_{nullptr};
  SqueezeExcite se_{nullptr};
  Conv project_conv_{nullptr};
  Norm project_norm_{nullptr};
  bool residual_;
};

/// 2x max pooling.
class MaxPoolImpl : public BlockImpl {
 public:
  explicit MaxPoolImpl(std::int64_t dims) : dims_(dims) {}
  torch::Tensor forward(const torch::Tensor& x) override;

 private:
  std::int64_t dims_;
};

/// Sequence of blocks, registered as "0", "1", ...
class StageImpl : public torch::nn::Module {
 public:
  void append(std::shared_ptr<BlockImpl> block);
  torch::Tensor forward(torch::Tensor x);
  const std::vector<std::shared_ptr<BlockImpl>>& blocks() const { return blocks_; }

 private:
  std::vector<std::shared_ptr<BlockImpl>> blocks_;
};
TORCH_MODULE(Stage);

}  // namespace oarseg::nn
