#include "oarseg/model/config.hpp"

#include <string>

#include "oarseg/errors.hpp"

namespace oarseg {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::unet2d: return "unet2d";
    case Variant::unetpp2d: return "unetpp2d";
    case Variant::resunet2d: return "resunet2d";
    case Variant::dilated_resunet2d: return "dilated_resunet2d";
    case Variant::resunet3d: return "resunet3d";
  }
  return "?";
}

std::string_view to_string(EncoderKind e) {
  switch (e) {
    case EncoderKind::plain: return "plain";
    case EncoderKind::resnet34_style: return "resnet34_style";
    case EncoderKind::efficientnet_style: return "efficientnet_style";
  }
  return "?";
}

std::string_view to_string(NormKind n) { return n == NormKind::instance ? "instance" : "batch"; }

Variant variant_from_string(std::string_view s) {
  for (auto v : {Variant::unet2d, Variant::unetpp2d, Variant::resunet2d, Variant::dilated_resunet2d,
                 Variant::resunet3d}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidConfig("unknown model variant '" + std::string(s) + "'");
}

EncoderKind encoder_from_string(std::string_view s) {
  for (auto e : {EncoderKind::plain, EncoderKind::resnet34_style, EncoderKind::efficientnet_style}) {
    if (to_string(e) == s) return e;
  }
  throw InvalidConfig("unknown encoder '" + std::string(s) + "'");
}

NormKind norm_from_string(std::string_view s) {
  if (s == "instance") return NormKind::instance;
  if (s == "batch") return NormKind::batch;
  throw InvalidConfig("unknown norm '" + std::string(s) + "'");
}

bool is_residual(Variant v) {
  return v == Variant::resunet2d || v == Variant::dilated_resunet2d || v == Variant::resunet3d;
}

std::int64_t spatial_dims(Variant v) { return v == Variant::resunet3d ? 3 : 2; }

ModelConfig ModelConfig::for_variant(Variant v, std::int64_t num_classes, std::int64_t in_channels) {
  ModelConfig c;
  c.variant = v;
  c.num_classes = num_classes;
  c.in_channels = in_channels;
  c.dilation = v == Variant::dilated_resunet2d ? 3 : 1;
  c.norm = is_residual(v) ? NormKind::instance : NormKind::batch;
  return c;
}

void ModelConfig::validate() const {
  if (num_classes < 2) throw InvalidConfig("num_classes must be >= 2");
  if (depth < 2) throw InvalidConfig("depth must be >= 2");
  if (depth > 8) throw InvalidConfig("depth must be <= 8");
  if (base_width < 4) throw InvalidConfig("base_width must be >= 4");
  if (in_channels < 1) throw InvalidConfig("in_channels must be >= 1");
  if (dilation < 1) throw InvalidConfig("dilation must be >= 1");
  if (dilation != 1 && variant != Variant::dilated_resunet2d) {
    throw InvalidConfig("dilation " + std::to_string(dilation) + " is only valid for dilated_resunet2d");
  }
  if (deep_supervision && variant != Variant::unetpp2d) {
    throw InvalidConfig("deep_supervision is only available for unetpp2d");
  }
  if (!(width_coefficient > 0.0) || !(depth_coefficient > 0.0)) {
    throw InvalidConfig("compound scaling coefficients must be positive");
  }
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"variant", std::string(to_string(c.variant))},
                     {"encoder", std::string(to_string(c.encoder))},
                     {"in_channels", c.in_channels},
                     {"num_classes", c.num_classes},
                     {"base_width", c.base_width},
                     {"depth", c.depth},
                     {"dilation", c.dilation},
                     {"norm", std::string(to_string(c.norm))},
                     {"deep_supervision", c.deep_supervision},
                     {"width_coefficient", c.width_coefficient},
                     {"depth_coefficient", c.depth_coefficient}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  const auto variant = j.contains("variant") ? variant_from_string(j.at("variant").get<std::string>()) : c.variant;
  const auto classes = j.value("num_classes", c.num_classes);
  const auto in_ch = j.value("in_channels", c.in_channels);
  auto out = ModelConfig::for_variant(variant, classes, in_ch);
  out.base_width = c.base_width;
  out.depth = c.depth;
  out.width_coefficient = c.width_coefficient;
  out.depth_coefficient = c.depth_coefficient;
  if (j.contains("encoder")) out.encoder = encoder_from_string(j.at("encoder").get<std::string>());
  if (j.contains("base_width")) out.base_width = j.at("base_width").get<std::int64_t>();
  if (j.contains("depth")) out.depth = j.at("depth").get<std::int64_t>();
  if (j.contains("dilation")) out.dilation = j.at("dilation").get<std::int64_t>();
  if (j.contains("norm")) out.norm = norm_from_string(j.at("norm").get<std::string>());
  if (j.contains("deep_supervision")) out.deep_supervision = j.at("deep_supervision").get<bool>();
  if (j.contains("width_coefficient")) out.width_coefficient = j.at("width_coefficient").get<double>();
  if (j.contains("depth_coefficient")) out.depth_coefficient = j.at("depth_coefficient").get<double>();
  out.validate();
  c = out;
}

}  // namespace oarseg
