#include "oarseg/model/zoo.hpp"

#include "oarseg/errors.hpp"

namespace oarseg {

Model::Model(ModelConfig cfg, std::shared_ptr<nn::SegmentationNetImpl> net)
    : config_(std::move(cfg)), net_(std::move(net)) {}

torch::Tensor Model::forward(const torch::Tensor& batch) { return forward_heads(batch).back(); }

std::vector<torch::Tensor> Model::forward_heads(const torch::Tensor& batch) {
  check_input(config_, batch);
  return net_->forward_heads(batch);
}

std::int64_t Model::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& p : net_->parameters()) n += p.numel();
  return n;
}

Model build_model(const ModelConfig& cfg) {
  cfg.validate();
  std::shared_ptr<nn::SegmentationNetImpl> net;
  if (cfg.variant == Variant::unetpp2d) {
    net = std::make_shared<nn::UNetPlusPlusImpl>(cfg);
  } else {
    net = std::make_shared<nn::UNetImpl>(cfg);
  }
  return Model(cfg, std::move(net));
}

void check_input(const ModelConfig& cfg, const torch::Tensor& batch) {
  const auto rank = cfg.dims() + 2;
  if (batch.dim() != rank) {
    throw ShapeError(std::string(to_string(cfg.variant)) + " expects a rank-" + std::to_string(rank) +
                     " batch, got rank " + std::to_string(batch.dim()));
  }
  if (batch.size(1) != cfg.in_channels) {
    throw ShapeError("expected " + std::to_string(cfg.in_channels) + " input channels, got " +
                     std::to_string(batch.size(1)));
  }
  const auto divisor = cfg.divisor();
  for (std::int64_t d = 2; d < rank; ++d) {
    if (batch.size(d) % divisor != 0 || batch.size(d) == 0) {
      throw ShapeError("spatial extent " + std::to_string(batch.size(d)) + " is not divisible by " +
                       std::to_string(divisor) + " (2^depth)");
    }
  }
}

std::int64_t parameter_count(const Model& m) { return m.parameter_count(); }

std::vector<ConvInfo> conv_layers(const Model& m) {
  std::vector<ConvInfo> out;
  for (const auto& item : m.net().named_modules("", /*include_self=*/false)) {
    if (const auto* conv = dynamic_cast<const nn::ConvImpl*>(item.value().get())) {
      out.push_back({item.key(), conv->spec()});
    }
  }
  return out;
}

std::string encoder_level_path(std::int64_t level) { return "encoder.level" + std::to_string(level) + "."; }

}  // namespace oarseg
