#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "oarseg/data/volume.hpp"

namespace oarseg {

enum class CropPolicy { none, label_foreground };
enum class IntensityNorm { none, zscore };

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool ordered() const { return lo <= hi; }
};

/// Preprocessing plus the stochastic augmentation chain. Defaults are desk-scale choices.
struct AugmentationConfig {
  // preprocessing
  CropPolicy crop = CropPolicy::label_foreground;
  std::int64_t crop_margin = 8;
  Shape3 crop_min_extent{32, 32, 32};
  IntensityNorm normalization = IntensityNorm::zscore;

  // augmentation
  Range contrast_gamma{0.8, 1.25};
  double contrast_prob = 0.3;

  Range rotation_deg{-10.0, 10.0};
  Range scale{0.9, 1.1};
  Range translation_vox{-5.0, 5.0};
  double affine_prob = 0.3;

  double elastic_sigma = 8.0;
  double elastic_magnitude = 2.0;
  double elastic_prob = 0.3;

  double noise_std = 0.05;
  double noise_prob = 0.3;

  /// Throws InvalidConfig when a probability leaves [0,1] or a range is inverted.
  void validate() const;

  /// Same settings with every augmentation probability set to zero.
  AugmentationConfig without_augmentation() const;
};

void to_json(nlohmann::json& j, const AugmentationConfig& c);
void from_json(const nlohmann::json& j, AugmentationConfig& c);

/// Tight bounding box of voxels with label > 0, or nullopt when there are none.
std::optional<Box3> foreground_box(const LabelMap& labels);

/// Crop box for `labels` under `cfg` (whole grid when cropping is disabled).
Box3 crop_box(const LabelMap& labels, const AugmentationConfig& cfg);

/// In-place zero-mean / unit-variance standardisation; outputs zeros when std < 1e-8.
void standardize(Grid3<float>& g);

/// Boundary crop followed by intensity normalisation. Labels are only cropped.
std::pair<Volume, LabelMap> preprocess(const Volume& v, const LabelMap& l, const AugmentationConfig& cfg);

/// Random contrast, affine, elastic and noise transforms. Volume and labels share the
/// spatial transform (linear vs nearest-neighbour sampling, border clamped); the output
/// is a deterministic function of `rng_seed`.
std::pair<Volume, LabelMap> augment(const Volume& v, const LabelMap& l, const AugmentationConfig& cfg,
                                    std::uint64_t rng_seed);

/// Worker seed derived from (global seed, patient id, epoch).
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view patient_id, std::int64_t epoch);

}  // namespace oarseg
