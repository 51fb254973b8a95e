#pragma once

#include <cstdint>
#include <string_view>

#include <nlohmann/json.hpp>

namespace oarseg {

enum class Variant { unet2d, unetpp2d, resunet2d, dilated_resunet2d, resunet3d };
enum class EncoderKind { plain, resnet34_style, efficientnet_style };
enum class NormKind { instance, batch };

std::string_view to_string(Variant v);
std::string_view to_string(EncoderKind e);
std::string_view to_string(NormKind n);
Variant variant_from_string(std::string_view s);
EncoderKind encoder_from_string(std::string_view s);
NormKind norm_from_string(std::string_view s);

bool is_residual(Variant v);
std::int64_t spatial_dims(Variant v);

struct ModelConfig {
  Variant variant = Variant::resunet3d;
  EncoderKind encoder = EncoderKind::plain;
  std::int64_t in_channels = 1;
  std::int64_t num_classes = 2;  // foreground classes + background
  std::int64_t base_width = 16;
  std::int64_t depth = 5;     // number of 2x downsamplings
  std::int64_t dilation = 1;  // applied to the two deepest encoder stages and the bottleneck
  NormKind norm = NormKind::instance;
  bool deep_supervision = false;  // U-Net++ only
  // EfficientNet-style compound scaling knobs (ignored by other encoders).
  double width_coefficient = 1.0;
  double depth_coefficient = 1.0;

  /// Variant defaults: dilation 3 for the dilated ResU-Net, instance norm for the
  /// residual variants and batch norm for the plain U-Nets.
  static ModelConfig for_variant(Variant v, std::int64_t num_classes, std::int64_t in_channels = 1);

  std::int64_t dims() const { return spatial_dims(variant); }
  std::int64_t divisor() const { return std::int64_t{1} << depth; }

  /// Throws InvalidConfig for out-of-range fields and incompatible combinations.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
/// Missing fields take the variant defaults; the result is validated.
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace oarseg
