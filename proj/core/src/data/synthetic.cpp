#include "oarseg/data/synthetic.hpp"

#include <cmath>
#include <random>

#include "oarseg/data/dataset_spec.hpp"

namespace oarseg {

LabeledVolume make_phantom(const SyntheticOptions& opt, std::int64_t index) {
  const auto e = opt.extent;
  const double E = static_cast<double>(e);
  std::mt19937_64 rng(opt.seed * 1000003ULL + static_cast<std::uint64_t>(index));
  auto jitter = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  // Positions are fractions of the extent.
  const std::array<double, 3> lung_c{E * 0.5 + jitter(-2, 2), E * 0.45 + jitter(-2, 2), E * 0.3 + jitter(-1.5, 1.5)};
  const std::array<double, 3> lung_r{E * jitter(0.2, 0.26), E * jitter(0.24, 0.3), E * jitter(0.16, 0.2)};
  const double cord_y = E * 0.78 + jitter(-1, 1);
  const double cord_x = E * 0.62 + jitter(-1, 1);
  const double cord_r = jitter(1.4, 2.0);
  const std::array<double, 3> sphere_c{E * 0.5 + jitter(-3, 3), E * 0.3 + jitter(-2, 2), E * 0.75 + jitter(-2, 2)};
  const double sphere_r = jitter(2.8, 3.5);

  const auto spec = synthetic_spec();
  LabeledVolume out;
  out.volume.patient_id = "phantom_" + std::string(index < 10 ? "00" : index < 100 ? "0" : "") + std::to_string(index);
  out.volume.spacing = opt.spacing;
  out.volume.voxels = Grid3<float>({e, e, e}, 0.0f);
  out.labels.class_names = spec.class_names();
  out.labels.labels = Grid3<Label>({e, e, e}, 0);

  constexpr float kIntensity[4] = {0.0f, -1.0f, 1.0f, 0.6f};
  std::normal_distribution<float> noise(0.0f, static_cast<float>(opt.noise_std));
  for (std::int64_t z = 0; z < e; ++z)
    for (std::int64_t y = 0; y < e; ++y)
      for (std::int64_t x = 0; x < e; ++x) {
        const double pz = static_cast<double>(z), py = static_cast<double>(y), px = static_cast<double>(x);
        Label label = 0;
        const double ez = (pz - lung_c[0]) / lung_r[0], ey = (py - lung_c[1]) / lung_r[1],
                     ex = (px - lung_c[2]) / lung_r[2];
        if (ez * ez + ey * ey + ex * ex <= 1.0) label = 1;
        if (std::hypot(py - cord_y, px - cord_x) <= cord_r) label = 2;
        if (std::hypot(pz - sphere_c[0], py - sphere_c[1], px - sphere_c[2]) <= sphere_r) label = 3;
        out.labels.labels(z, y, x) = label;
        out.volume.voxels(z, y, x) = kIntensity[label] + noise(rng);
      }
  return out;
}

std::vector<LabeledVolume> make_synthetic_dataset(std::int64_t count, const SyntheticOptions& opt) {
  std::vector<LabeledVolume> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) out.push_back(make_phantom(opt, i));
  return out;
}

}  // namespace oarseg
