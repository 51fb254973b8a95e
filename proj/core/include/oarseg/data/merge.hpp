#pragma once

#include <string>
#include <vector>

#include "oarseg/data/volume.hpp"

namespace oarseg {

/// Merges binary organ masks into one label map. Mask i becomes label i+1; where
/// masks overlap the last listed mask wins. `class_names` lists the foreground
/// classes in mask order ("background" is prepended).
LabelMap merge_masks(const std::vector<Grid3<Label>>& masks, const std::vector<std::string>& class_names);

/// Voxels equal to `class_id` become 1, everything else 0.
Grid3<Label> binarize(const LabelMap& labels, Label class_id);

}  // namespace oarseg
