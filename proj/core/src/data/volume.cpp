#include "oarseg/data/volume.hpp"

namespace oarseg {

void Volume::validate() const {
  if (!voxels.shape().valid()) {
    throw ShapeMismatch("volume '" + patient_id + "' has a degenerate shape " + to_string(voxels.shape()));
  }
  for (double s : spacing) {
    if (!(s > 0.0)) throw FormatError("volume '" + patient_id + "' has non-positive spacing");
  }
}

void LabelMap::validate() const {
  if (class_names.empty() || class_names.front() != "background") {
    throw FormatError("label map class list must start with 'background'");
  }
  const auto n = class_names.size();
  for (Label v : labels.values()) {
    if (v >= n) {
      throw LabelOutOfRange("label " + std::to_string(v) + " outside [0, " + std::to_string(n) + ")");
    }
  }
}

void check_paired(const Volume& v, const LabelMap& l) {
  if (v.voxels.shape() != l.labels.shape()) {
    throw ShapeMismatch("patient '" + v.patient_id + "': volume " + to_string(v.voxels.shape()) +
                        " vs labels " + to_string(l.labels.shape()));
  }
}

}  // namespace oarseg
