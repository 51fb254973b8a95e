#pragma once

#include <cstdint>
#include <random>

#include "oarseg/data/volume.hpp"

namespace oarseg {

/// Random fixed-size training patch. With probability `foreground_prob` the patch is
/// centred on a random foreground voxel, otherwise its origin is uniform. Volumes smaller
/// than the patch are padded (intensity with the volume minimum, labels with background).
LabeledVolume sample_patch(const LabeledVolume& item, Shape3 patch, double foreground_prob, std::mt19937_64& rng);

/// Smallest multiple of `divisor` that is >= n.
std::int64_t round_up(std::int64_t n, std::int64_t divisor);

}  // namespace oarseg
