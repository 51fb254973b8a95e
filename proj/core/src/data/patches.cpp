#include "oarseg/data/patches.hpp"

#include <algorithm>

namespace oarseg {

std::int64_t round_up(std::int64_t n, std::int64_t divisor) { return (n + divisor - 1) / divisor * divisor; }

LabeledVolume sample_patch(const LabeledVolume& item, Shape3 patch, double foreground_prob, std::mt19937_64& rng) {
  check_paired(item.volume, item.labels);
  if (!patch.valid()) throw InvalidConfig("patch shape " + to_string(patch) + " is degenerate");

  const auto& vox = item.volume.voxels;
  const float fill = vox.empty() ? 0.0f : *std::min_element(vox.values().begin(), vox.values().end());
  const auto voxels = pad_to(vox, patch, fill);
  const auto labels = pad_to(item.labels.labels, patch, Label{0});
  const auto s = voxels.shape();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<std::int64_t, 3> origin{0, 0, 0};
  bool centred = false;
  if (unit(rng) < foreground_prob) {
    std::vector<std::size_t> fg;
    const auto lv = labels.values();
    for (std::size_t i = 0; i < lv.size(); ++i)
      if (lv[i] != 0) fg.push_back(i);
    if (!fg.empty()) {
      const auto idx = static_cast<std::int64_t>(fg[std::uniform_int_distribution<std::size_t>(0, fg.size() - 1)(rng)]);
      const std::array<std::int64_t, 3> c{idx / (s.h * s.w), (idx / s.w) % s.h, idx % s.w};
      for (std::size_t a = 0; a < 3; ++a) origin[a] = std::clamp<std::int64_t>(c[a] - patch[a] / 2, 0, s[a] - patch[a]);
      centred = true;
    }
  }
  if (!centred) {
    for (std::size_t a = 0; a < 3; ++a) {
      origin[a] = std::uniform_int_distribution<std::int64_t>(0, s[a] - patch[a])(rng);
    }
  }
  const Box3 box{origin, {origin[0] + patch.d, origin[1] + patch.h, origin[2] + patch.w}};
  LabeledVolume out;
  out.volume = {crop(voxels, box), item.volume.spacing, item.volume.patient_id};
  out.labels = {crop(labels, box), item.labels.class_names};
  return out;
}

}  // namespace oarseg
