#pragma once

#include <optional>
#include <vector>

#include "oarseg/data/volume.hpp"

namespace oarseg {

/// 2|P∩R| / (|P|+|R|) for the voxels labelled `class_id`; 1.0 when both sets are empty.
double dice_score(const LabelMap& pred, const LabelMap& ref, Label class_id);
double dice_score(const Grid3<Label>& pred, const Grid3<Label>& ref, Label class_id);

/// Voxels of the set whose 6-neighbourhood leaves the set (the grid border counts as outside).
Grid3<Label> boundary(const Grid3<Label>& labels, Label class_id);

/// Exact Euclidean distance (mm) from every voxel to the nearest nonzero voxel of `mask`,
/// or +inf everywhere when the mask is empty. Separable lower-envelope transform.
Grid3<double> distance_to(const Grid3<Label>& mask, const Spacing& spacing);

/// 95th percentile (linear interpolation) of the pooled directed boundary distances
/// P->R and R->P, in mm. nullopt when either set is empty.
std::optional<double> hd95(const LabelMap& pred, const LabelMap& ref, Label class_id, const Spacing& spacing);
std::optional<double> hd95(const Grid3<Label>& pred, const Grid3<Label>& ref, Label class_id, const Spacing& spacing);

/// Linear-interpolation percentile, q in [0,1]; `values` is sorted in place.
double percentile(std::vector<double>& values, double q);

}  // namespace oarseg
