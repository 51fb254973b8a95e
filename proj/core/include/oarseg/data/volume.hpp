#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "oarseg/grid.hpp"

namespace oarseg {

using Label = std::uint8_t;

/// Millimetres per voxel along each array axis (same order as Shape3).
using Spacing = std::array<double, 3>;

/// A 3D scalar image at native resolution.
struct Volume {
  Grid3<float> voxels;
  Spacing spacing{1.0, 1.0, 1.0};
  std::string patient_id;

  /// Throws ShapeMismatch / FormatError when an invariant is violated.
  void validate() const;
};

/// Integer class labels with the ordered class list (index 0 is "background").
struct LabelMap {
  Grid3<Label> labels;
  std::vector<std::string> class_names{"background"};

  std::size_t num_classes() const { return class_names.size(); }
  void validate() const;
};

struct LabeledVolume {
  Volume volume;
  LabelMap labels;
};

/// Checks that a volume and label map can be paired.
void check_paired(const Volume& v, const LabelMap& l);

}  // namespace oarseg
