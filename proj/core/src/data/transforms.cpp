#include "oarseg/data/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace oarseg {
namespace {

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig(std::string(name) + " must lie in [0,1]");
}

void check_range(const Range& r, const char* name) {
  if (!r.ordered()) throw InvalidConfig(std::string(name) + " range is inverted");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

Mat3 rotation(int axis, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  Mat3 r{};
  r[axis][axis] = 1.0;
  const int a = (axis + 1) % 3, b = (axis + 2) % 3;
  r[a][a] = c;
  r[a][b] = -s;
  r[b][a] = s;
  r[b][b] = c;
  return r;
}

// Separable Gaussian blur along one axis with clamped borders.
void blur_axis(Grid3<float>& g, int axis, const std::vector<double>& kernel) {
  const auto shape = g.shape();
  const auto radius = static_cast<std::int64_t>(kernel.size() / 2);
  const std::int64_t n = shape[static_cast<std::size_t>(axis)];
  std::vector<double> line(static_cast<std::size_t>(n));
  const std::int64_t outer_a = axis == 0 ? shape.h : shape.d;
  const std::int64_t outer_b = axis == 2 ? shape.h : shape.w;
  for (std::int64_t i = 0; i < outer_a; ++i) {
    for (std::int64_t j = 0; j < outer_b; ++j) {
      auto at = [&](std::int64_t k) -> float& {
        if (axis == 0) return g(k, i, j);
        if (axis == 1) return g(i, k, j);
        return g(i, j, k);
      };
      for (std::int64_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::int64_t t = -radius; t <= radius; ++t) {
          const auto src = std::clamp<std::int64_t>(k + t, 0, n - 1);
          acc += kernel[static_cast<std::size_t>(t + radius)] * at(src);
        }
        line[static_cast<std::size_t>(k)] = acc;
      }
      for (std::int64_t k = 0; k < n; ++k) at(k) = static_cast<float>(line[static_cast<std::size_t>(k)]);
    }
  }
}

Grid3<float> smooth_noise_field(Shape3 shape, double sigma, double magnitude, std::mt19937_64& rng) {
  Grid3<float> field(shape);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (auto& v : field.values()) v = u(rng);
  if (sigma > 0.0) {
    const auto radius = static_cast<std::int64_t>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (std::int64_t t = -radius; t <= radius; ++t) {
      const double w = std::exp(-0.5 * static_cast<double>(t * t) / (sigma * sigma));
      kernel[static_cast<std::size_t>(t + radius)] = w;
      total += w;
    }
    for (auto& w : kernel) w /= total;
    for (int axis = 0; axis < 3; ++axis) blur_axis(field, axis, kernel);
  }
  float peak = 0.0f;
  for (float v : field.values()) peak = std::max(peak, std::abs(v));
  const float scale = peak > 0.0f ? static_cast<float>(magnitude) / peak : 0.0f;
  for (auto& v : field.values()) v *= scale;
  return field;
}

float sample_linear(const Grid3<float>& g, double z, double y, double x) {
  const auto& s = g.shape();
  z = std::clamp(z, 0.0, static_cast<double>(s.d - 1));
  y = std::clamp(y, 0.0, static_cast<double>(s.h - 1));
  x = std::clamp(x, 0.0, static_cast<double>(s.w - 1));
  const auto z0 = static_cast<std::int64_t>(std::floor(z));
  const auto y0 = static_cast<std::int64_t>(std::floor(y));
  const auto x0 = static_cast<std::int64_t>(std::floor(x));
  const auto z1 = std::min(z0 + 1, s.d - 1);
  const auto y1 = std::min(y0 + 1, s.h - 1);
  const auto x1 = std::min(x0 + 1, s.w - 1);
  const double fz = z - static_cast<double>(z0), fy = y - static_cast<double>(y0), fx = x - static_cast<double>(x0);
  const double c00 = g(z0, y0, x0) * (1 - fx) + g(z0, y0, x1) * fx;
  const double c01 = g(z0, y1, x0) * (1 - fx) + g(z0, y1, x1) * fx;
  const double c10 = g(z1, y0, x0) * (1 - fx) + g(z1, y0, x1) * fx;
  const double c11 = g(z1, y1, x0) * (1 - fx) + g(z1, y1, x1) * fx;
  const double c0 = c00 * (1 - fy) + c01 * fy;
  const double c1 = c10 * (1 - fy) + c11 * fy;
  return static_cast<float>(c0 * (1 - fz) + c1 * fz);
}

Label sample_nearest(const Grid3<Label>& g, double z, double y, double x) {
  const auto& s = g.shape();
  const auto zi = std::clamp<std::int64_t>(std::llround(z), 0, s.d - 1);
  const auto yi = std::clamp<std::int64_t>(std::llround(y), 0, s.h - 1);
  const auto xi = std::clamp<std::int64_t>(std::llround(x), 0, s.w - 1);
  return g(zi, yi, xi);
}

}  // namespace

void AugmentationConfig::validate() const {
  check_prob(contrast_prob, "contrast_prob");
  check_prob(affine_prob, "affine_prob");
  check_prob(elastic_prob, "elastic_prob");
  check_prob(noise_prob, "noise_prob");
  check_range(contrast_gamma, "contrast_gamma");
  check_range(rotation_deg, "rotation_deg");
  check_range(scale, "scale");
  check_range(translation_vox, "translation_vox");
  if (contrast_gamma.lo <= 0.0) throw InvalidConfig("contrast gamma must be positive");
  if (scale.lo <= 0.0) throw InvalidConfig("affine scale must be positive");
  if (elastic_sigma < 0.0 || elastic_magnitude < 0.0 || noise_std < 0.0) {
    throw InvalidConfig("elastic sigma/magnitude and noise std must be nonnegative");
  }
  if (crop_margin < 0) throw InvalidConfig("crop_margin must be nonnegative");
  if (!crop_min_extent.valid()) throw InvalidConfig("crop_min_extent must be at least 1 per axis");
}

AugmentationConfig AugmentationConfig::without_augmentation() const {
  auto c = *this;
  c.contrast_prob = c.affine_prob = c.elastic_prob = c.noise_prob = 0.0;
  return c;
}

NLOHMANN_JSON_SERIALIZE_ENUM(CropPolicy, {{CropPolicy::none, "none"}, {CropPolicy::label_foreground, "label_foreground"}})
NLOHMANN_JSON_SERIALIZE_ENUM(IntensityNorm, {{IntensityNorm::none, "none"}, {IntensityNorm::zscore, "zscore"}})

void to_json(nlohmann::json& j, const AugmentationConfig& c) {
  auto range = [](const Range& r) { return nlohmann::json::array({r.lo, r.hi}); };
  j = nlohmann::json{{"crop", c.crop},
                     {"crop_margin", c.crop_margin},
                     {"crop_min_extent", {c.crop_min_extent.d, c.crop_min_extent.h, c.crop_min_extent.w}},
                     {"normalization", c.normalization},
                     {"contrast_gamma", range(c.contrast_gamma)},
                     {"contrast_prob", c.contrast_prob},
                     {"rotation_deg", range(c.rotation_deg)},
                     {"scale", range(c.scale)},
                     {"translation_vox", range(c.translation_vox)},
                     {"affine_prob", c.affine_prob},
                     {"elastic_sigma", c.elastic_sigma},
                     {"elastic_magnitude", c.elastic_magnitude},
                     {"elastic_prob", c.elastic_prob},
                     {"noise_std", c.noise_std},
                     {"noise_prob", c.noise_prob}};
}

void from_json(const nlohmann::json& j, AugmentationConfig& c) {
  auto range = [&](const char* key, Range& r) {
    if (j.contains(key)) {
      const auto& a = j.at(key);
      r = {a.at(0).get<double>(), a.at(1).get<double>()};
    }
  };
  auto num = [&](const char* key, auto& v) {
    if (j.contains(key)) v = j.at(key).get<std::remove_reference_t<decltype(v)>>();
  };
  num("crop", c.crop);
  num("crop_margin", c.crop_margin);
  if (j.contains("crop_min_extent")) {
    const auto& e = j.at("crop_min_extent");
    c.crop_min_extent = {e.at(0).get<std::int64_t>(), e.at(1).get<std::int64_t>(), e.at(2).get<std::int64_t>()};
  }
  num("normalization", c.normalization);
  range("contrast_gamma", c.contrast_gamma);
  num("contrast_prob", c.contrast_prob);
  range("rotation_deg", c.rotation_deg);
  range("scale", c.scale);
  range("translation_vox", c.translation_vox);
  num("affine_prob", c.affine_prob);
  num("elastic_sigma", c.elastic_sigma);
  num("elastic_magnitude", c.elastic_magnitude);
  num("elastic_prob", c.elastic_prob);
  num("noise_std", c.noise_std);
  num("noise_prob", c.noise_prob);
  c.validate();
}

std::optional<Box3> foreground_box(const LabelMap& labels) {
  const auto& g = labels.labels;
  const auto& s = g.shape();
  Box3 box{{s.d, s.h, s.w}, {0, 0, 0}};
  bool any = false;
  for (std::int64_t z = 0; z < s.d; ++z)
    for (std::int64_t y = 0; y < s.h; ++y)
      for (std::int64_t x = 0; x < s.w; ++x) {
        if (g(z, y, x) == 0) continue;
        any = true;
        const std::array<std::int64_t, 3> p{z, y, x};
        for (std::size_t a = 0; a < 3; ++a) {
          box.lo[a] = std::min(box.lo[a], p[a]);
          box.hi[a] = std::max(box.hi[a], p[a] + 1);
        }
      }
  if (!any) return std::nullopt;
  return box;
}

Box3 crop_box(const LabelMap& labels, const AugmentationConfig& cfg) {
  const auto& s = labels.labels.shape();
  Box3 full{{0, 0, 0}, {s.d, s.h, s.w}};
  if (cfg.crop == CropPolicy::none) return full;

  Box3 box;
  if (auto fg = foreground_box(labels)) {
    box = *fg;
    for (std::size_t a = 0; a < 3; ++a) {
      box.lo[a] = std::max<std::int64_t>(0, box.lo[a] - cfg.crop_margin);
      box.hi[a] = std::min(s[a], box.hi[a] + cfg.crop_margin);
    }
  } else {
    // No foreground: keep a centred block of the minimum extent.
    for (std::size_t a = 0; a < 3; ++a) {
      box.lo[a] = s[a] / 2;
      box.hi[a] = box.lo[a];
    }
  }
  // Grow symmetrically to the minimum extent, shifting inside the grid when needed.
  for (std::size_t a = 0; a < 3; ++a) {
    const auto want = std::min(s[a], cfg.crop_min_extent[a]);
    const auto have = box.hi[a] - box.lo[a];
    if (have >= want) continue;
    auto lo = box.lo[a] - (want - have) / 2;
    lo = std::clamp<std::int64_t>(lo, 0, s[a] - want);
    box.lo[a] = lo;
    box.hi[a] = lo + want;
  }
  return box;
}

void standardize(Grid3<float>& g) {
  const auto values = g.values();
  if (values.empty()) return;
  double mean = 0.0;
  for (float v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (float v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(values.size()));
  if (sd < 1e-8) {
    std::fill(values.begin(), values.end(), 0.0f);
    return;
  }
  for (auto& v : values) v = static_cast<float>((v - mean) / sd);
}

std::pair<Volume, LabelMap> preprocess(const Volume& v, const LabelMap& l, const AugmentationConfig& cfg) {
  check_paired(v, l);
  const auto box = crop_box(l, cfg);
  Volume out_v{crop(v.voxels, box), v.spacing, v.patient_id};
  LabelMap out_l{crop(l.labels, box), l.class_names};
  if (cfg.normalization == IntensityNorm::zscore) standardize(out_v.voxels);
  return {std::move(out_v), std::move(out_l)};
}

std::pair<Volume, LabelMap> augment(const Volume& v, const LabelMap& l, const AugmentationConfig& cfg,
                                    std::uint64_t rng_seed) {
  check_paired(v, l);
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](const Range& r) { return r.lo + (r.hi - r.lo) * unit(rng); };

  Volume out_v = v;
  LabelMap out_l = l;
  const auto shape = v.voxels.shape();

  const bool do_affine = unit(rng) < cfg.affine_prob;
  const bool do_elastic = unit(rng) < cfg.elastic_prob;
  if (do_affine || do_elastic) {
    Mat3 linear{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    std::array<double, 3> shift{0, 0, 0};
    if (do_affine) {
      const double deg = std::numbers::pi / 180.0;
      Mat3 rot = rotation(0, uniform(cfg.rotation_deg) * deg);
      rot = multiply(rotation(1, uniform(cfg.rotation_deg) * deg), rot);
      rot = multiply(rotation(2, uniform(cfg.rotation_deg) * deg), rot);
      Mat3 scale{};
      for (int a = 0; a < 3; ++a) scale[a][a] = uniform(cfg.scale);
      linear = multiply(rot, scale);
      for (auto& t : shift) t = uniform(cfg.translation_vox);
    }
    std::array<Grid3<float>, 3> disp;
    if (do_elastic) {
      for (auto& d : disp) d = smooth_noise_field(shape, cfg.elastic_sigma, cfg.elastic_magnitude, rng);
    }

    // Output voxel -> source position, rotating and scaling about the centre in mm.
    const auto& sp = v.spacing;
    const std::array<double, 3> centre{(shape.d - 1) * 0.5, (shape.h - 1) * 0.5, (shape.w - 1) * 0.5};
    for (std::int64_t z = 0; z < shape.d; ++z)
      for (std::int64_t y = 0; y < shape.h; ++y)
        for (std::int64_t x = 0; x < shape.w; ++x) {
          const std::array<double, 3> p{static_cast<double>(z), static_cast<double>(y), static_cast<double>(x)};
          std::array<double, 3> rel;
          for (int a = 0; a < 3; ++a) rel[a] = (p[a] - centre[a]) * sp[a];
          std::array<double, 3> src;
          for (int a = 0; a < 3; ++a) {
            double mm = 0.0;
            for (int b = 0; b < 3; ++b) mm += linear[a][b] * rel[b];
            src[a] = centre[a] + mm / sp[a] + shift[a];
            if (do_elastic) src[a] += disp[a](z, y, x);
          }
          out_v.voxels(z, y, x) = sample_linear(v.voxels, src[0], src[1], src[2]);
          out_l.labels(z, y, x) = sample_nearest(l.labels, src[0], src[1], src[2]);
        }
  }

  if (unit(rng) < cfg.contrast_prob) {
    const double gamma = uniform(cfg.contrast_gamma);
    auto values = out_v.voxels.values();
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, range = *hi_it - *lo_it;
    constexpr double eps = 1e-7;
    for (auto& x : values) {
      x = static_cast<float>(std::pow((x - lo + eps) / (range + eps), gamma) * range + lo);
    }
  }

  if (unit(rng) < cfg.noise_prob) {
    std::normal_distribution<float> noise(0.0f, static_cast<float>(cfg.noise_std));
    for (auto& x : out_v.voxels.values()) x += noise(rng);
  }
  return {std::move(out_v), std::move(out_l)};
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view patient_id, std::int64_t epoch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : patient_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(global_seed ^ h) + static_cast<std::uint64_t>(epoch));
}

}  // namespace oarseg
