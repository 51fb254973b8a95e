#include "oarseg/data/merge.hpp"

namespace oarseg {

LabelMap merge_masks(const std::vector<Grid3<Label>>& masks, const std::vector<std::string>& class_names) {
  if (masks.size() != class_names.size()) {
    throw ClassMismatch(std::to_string(masks.size()) + " masks for " + std::to_string(class_names.size()) +
                        " class names");
  }
  if (masks.size() + 1 > 256) throw InvalidConfig("at most 255 foreground classes are supported");

  LabelMap out;
  out.class_names.insert(out.class_names.end(), class_names.begin(), class_names.end());
  if (masks.empty()) return out;

  const Shape3 shape = masks.front().shape();
  out.labels = Grid3<Label>(shape, 0);
  auto dst = out.labels.values();
  for (std::size_t m = 0; m < masks.size(); ++m) {
    if (masks[m].shape() != shape) {
      throw ShapeMismatch("mask '" + class_names[m] + "' has shape " + to_string(masks[m].shape()) +
                          ", expected " + to_string(shape));
    }
    const auto src = masks[m].values();
    const auto label = static_cast<Label>(m + 1);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] > 1) throw FormatError("mask '" + class_names[m] + "' is not binary");
      if (src[i] == 1) dst[i] = label;  // later masks override earlier ones
    }
  }
  return out;
}

Grid3<Label> binarize(const LabelMap& labels, Label class_id) {
  Grid3<Label> out(labels.labels.shape(), 0);
  const auto src = labels.labels.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] == class_id ? 1 : 0;
  return out;
}

}  // namespace oarseg
