#pragma once

#include <cstdint>
#include <vector>

#include "oarseg/data/volume.hpp"

namespace oarseg {

struct SyntheticOptions {
  std::int64_t extent = 32;
  Spacing spacing{2.0, 1.0, 1.0};
  double noise_std = 0.1;
  std::uint64_t seed = 7;
};

/// One phantom: a large ellipsoid (label 1), a thin tube along the slow axis (label 2)
/// and a small sphere (label 3), each with its own mean intensity plus Gaussian noise.
/// Class names follow `synthetic_spec()`.
LabeledVolume make_phantom(const SyntheticOptions& opt, std::int64_t index);

std::vector<LabeledVolume> make_synthetic_dataset(std::int64_t count, const SyntheticOptions& opt);

}  // namespace oarseg
