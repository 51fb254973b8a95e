#include "oarseg/model/networks.hpp"

#include <cmath>

namespace oarseg::nn {
namespace {

// Basic-block counts of the four ResNet34 stages; deeper levels reuse the last entry.
constexpr std::int64_t kResNet34Blocks[] = {3, 4, 6, 3};
// EfficientNet-B0 stage repeats; scaled by the depth coefficient.
constexpr std::int64_t kEfficientNetRepeats[] = {1, 2, 2, 3, 3, 4, 1};
constexpr std::int64_t kExpandRatio = 4;

std::int64_t width_at(const ModelConfig& cfg, std::int64_t level) {
  const auto w = cfg.base_width << level;
  if (cfg.encoder != EncoderKind::efficientnet_style) return w;
  return std::max<std::int64_t>(4, std::llround(static_cast<double>(w) * cfg.width_coefficient));
}

std::shared_ptr<BlockImpl> decoder_block(const ModelConfig& cfg, std::int64_t in, std::int64_t out) {
  if (is_residual(cfg.variant)) return std::make_shared<ResidualUnitImpl>(cfg.dims(), in, out, cfg.norm);
  return std::make_shared<DoubleConvImpl>(cfg.dims(), in, out, cfg.norm);
}

std::shared_ptr<ConvImpl> upsampler(const ModelConfig& cfg, std::int64_t in, std::int64_t out) {
  return std::make_shared<ConvImpl>(
      ConvSpec{.dims = cfg.dims(), .in = in, .out = out, .kernel = 2, .stride = 2, .transposed = true});
}

std::shared_ptr<ConvImpl> head(const ModelConfig& cfg, std::int64_t in) {
  return std::make_shared<ConvImpl>(
      ConvSpec{.dims = cfg.dims(), .in = in, .out = cfg.num_classes, .kernel = 1, .bias = true});
}

}  // namespace

std::int64_t level_dilation(const ModelConfig& cfg, std::int64_t level) {
  return level >= cfg.depth - 2 ? cfg.dilation : 1;
}

EncoderImpl::EncoderImpl(const ModelConfig& cfg) {
  const auto dims = cfg.dims();
  for (std::int64_t level = 0; level <= cfg.depth; ++level) {
    const auto in = level == 0 ? cfg.in_channels : channels_.back();
    const auto out = width_at(cfg, level);
    const auto dil = level_dilation(cfg, level);
    const std::int64_t stride = level == 0 ? 1 : 2;
    Stage stage;
    switch (cfg.encoder) {
      case EncoderKind::plain:
        if (is_residual(cfg.variant)) {
          stage->append(std::make_shared<ResidualUnitImpl>(dims, in, out, cfg.norm, stride, dil));
        } else {
          if (level > 0) stage->append(std::make_shared<MaxPoolImpl>(dims));
          stage->append(std::make_shared<DoubleConvImpl>(dims, in, out, cfg.norm, dil));
        }
        break;
      case EncoderKind::resnet34_style: {
        if (level == 0) {
          stage->append(std::make_shared<ConvNormActImpl>(
              ConvSpec{.dims = dims, .in = in, .out = out, .dilation = dil}, cfg.norm));
          stage->append(std::make_shared<ResidualUnitImpl>(dims, out, out, cfg.norm, 1, dil));
          break;
        }
        const auto blocks = kResNet34Blocks[std::min<std::int64_t>(level - 1, 3)];
        stage->append(std::make_shared<ResidualUnitImpl>(dims, in, out, cfg.norm, 2, dil));
        for (std::int64_t b = 1; b < blocks; ++b) {
          stage->append(std::make_shared<ResidualUnitImpl>(dims, out, out, cfg.norm, 1, dil));
        }
        break;
      }
      case EncoderKind::efficientnet_style: {
        if (level == 0) {
          stage->append(std::make_shared<ConvNormActImpl>(
              ConvSpec{.dims = dims, .in = in, .out = out, .dilation = dil}, cfg.norm, Activation::silu));
          break;
        }
        const auto base = kEfficientNetRepeats[std::min<std::int64_t>(level - 1, 6)];
        const auto repeats = static_cast<std::int64_t>(std::ceil(static_cast<double>(base) * cfg.depth_coefficient));
        stage->append(std::make_shared<MBConvImpl>(dims, in, out, cfg.norm, 2, kExpandRatio, dil));
        for (std::int64_t r = 1; r < repeats; ++r) {
          stage->append(std::make_shared<MBConvImpl>(dims, out, out, cfg.norm, 1, kExpandRatio, dil));
        }
        break;
      }
    }
    levels_.push_back(register_module("level" + std::to_string(level), stage));
    channels_.push_back(out);
  }
}

std::vector<torch::Tensor> EncoderImpl::forward(const torch::Tensor& x) {
  std::vector<torch::Tensor> features;
  auto y = x;
  for (auto& level : levels_) {
    y = level->forward(y);
    features.push_back(y);
  }
  return features;
}

UNetImpl::UNetImpl(const ModelConfig& cfg) {
  encoder_ = register_module("encoder", Encoder(cfg));
  const auto& ch = encoder_->channels();
  up_.resize(static_cast<std::size_t>(cfg.depth));
  decode_.resize(static_cast<std::size_t>(cfg.depth));
  for (std::int64_t i = cfg.depth - 1; i >= 0; --i) {
    const auto idx = static_cast<std::size_t>(i);
    up_[idx] = register_module("up" + std::to_string(i), upsampler(cfg, ch[idx + 1], ch[idx]));
    decode_[idx] = register_module("decode" + std::to_string(i), decoder_block(cfg, 2 * ch[idx], ch[idx]));
  }
  head_ = register_module("head", head(cfg, ch[0]));
}

std::vector<torch::Tensor> UNetImpl::forward_heads(const torch::Tensor& x) {
  auto features = encoder_->forward(x);
  auto y = features.back();
  for (auto i = static_cast<std::int64_t>(up_.size()) - 1; i >= 0; --i) {
    const auto idx = static_cast<std::size_t>(i);
    y = decode_[idx]->forward(torch::cat({features[idx], up_[idx]->forward(y)}, 1));
  }
  return {head_->forward(y)};
}

UNetPlusPlusImpl::UNetPlusPlusImpl(const ModelConfig& cfg)
    : depth_(cfg.depth), deep_supervision_(cfg.deep_supervision) {
  encoder_ = register_module("encoder", Encoder(cfg));
  const auto& ch = encoder_->channels();
  const auto n = static_cast<std::size_t>(depth_ + 1);
  up_.assign(n, std::vector<std::shared_ptr<ConvImpl>>(n));
  nodes_.assign(n, std::vector<std::shared_ptr<BlockImpl>>(n));
  for (std::int64_t j = 1; j <= depth_; ++j) {
    for (std::int64_t i = 0; i + j <= depth_; ++i) {
      const auto ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
      const auto tag = std::to_string(i) + "_" + std::to_string(j);
      up_[ii][jj] = register_module("up" + tag, upsampler(cfg, ch[ii + 1], ch[ii]));
      nodes_[ii][jj] = register_module("node" + tag, decoder_block(cfg, (j + 1) * ch[ii], ch[ii]));
    }
  }
  const std::int64_t first_head = deep_supervision_ ? 1 : depth_;
  for (std::int64_t j = first_head; j <= depth_; ++j) {
    heads_.push_back(register_module("head" + std::to_string(j), head(cfg, ch[0])));
  }
}

std::vector<torch::Tensor> UNetPlusPlusImpl::forward_heads(const torch::Tensor& x) {
  const auto n = static_cast<std::size_t>(depth_ + 1);
  std::vector<std::vector<torch::Tensor>> grid(n, std::vector<torch::Tensor>(n));
  auto features = encoder_->forward(x);
  for (std::size_t i = 0; i < n; ++i) grid[i][0] = features[i];
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i + j < n; ++i) {
      std::vector<torch::Tensor> inputs(grid[i].begin(), grid[i].begin() + static_cast<std::ptrdiff_t>(j));
      inputs.push_back(up_[i][j]->forward(grid[i + 1][j - 1]));
      grid[i][j] = nodes_[i][j]->forward(torch::cat(inputs, 1));
    }
  }
  std::vector<torch::Tensor> out;
  const std::size_t first = deep_supervision_ ? 1 : n - 1;
  for (std::size_t j = first, h = 0; j < n; ++j, ++h) out.push_back(heads_[h]->forward(grid[0][j]));
  return out;
}

}  // namespace oarseg::nn
