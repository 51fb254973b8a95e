#include "oarseg/metrics/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oarseg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_shape(const Grid3<Label>& a, const Grid3<Label>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch("prediction " + to_string(a.shape()) + " vs reference " + to_string(b.shape()));
  }
}

// Squared-distance lower envelope along one line. `f` holds squared distances,
// samples sit at physical positions i*step.
void envelope_1d(std::vector<double>& f, double step, std::vector<double>& out, std::vector<std::size_t>& v,
                 std::vector<double>& z) {
  const std::size_t n = f.size();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t k = 0;
  bool any = false;
  for (std::size_t q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    const double xq = static_cast<double>(q) * step;
    if (!any) {
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      any = true;
      continue;
    }
    double s = 0.0;
    while (true) {
      const double xv = static_cast<double>(v[k]) * step;
      s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv));
      if (s > z[k]) break;
      --k;  // z[0] is -inf
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  out.assign(n, kInf);
  if (!any) return;
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double xq = static_cast<double>(q) * step;
    while (z[k + 1] < xq) ++k;
    const double d = xq - static_cast<double>(v[k]) * step;
    out[q] = d * d + f[v[k]];
  }
}

}  // namespace

double dice_score(const Grid3<Label>& pred, const Grid3<Label>& ref, Label class_id) {
  check_same_shape(pred, ref);
  std::size_t p = 0, r = 0, both = 0;
  const auto pv = pred.values();
  const auto rv = ref.values();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const bool in_p = pv[i] == class_id, in_r = rv[i] == class_id;
    p += in_p;
    r += in_r;
    both += in_p && in_r;
  }
  if (p + r == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(p + r);
}

double dice_score(const LabelMap& pred, const LabelMap& ref, Label class_id) {
  if (class_id >= ref.num_classes()) throw LabelOutOfRange("class id " + std::to_string(class_id) + " is invalid");
  return dice_score(pred.labels, ref.labels, class_id);
}

Grid3<Label> boundary(const Grid3<Label>& labels, Label class_id) {
  const auto& s = labels.shape();
  Grid3<Label> out(s, 0);
  constexpr std::int64_t kOffsets[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  for (std::int64_t z = 0; z < s.d; ++z)
    for (std::int64_t y = 0; y < s.h; ++y)
      for (std::int64_t x = 0; x < s.w; ++x) {
        if (labels(z, y, x) != class_id) continue;
        for (const auto& o : kOffsets) {
          const auto nz = z + o[0], ny = y + o[1], nx = x + o[2];
          if (!labels.contains(nz, ny, nx) || labels(nz, ny, nx) != class_id) {
            out(z, y, x) = 1;
            break;
          }
        }
      }
  return out;
}

Grid3<double> distance_to(const Grid3<Label>& mask, const Spacing& spacing) {
  const auto& s = mask.shape();
  Grid3<double> sq(s, kInf);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask.values()[i] != 0) sq.values()[i] = 0.0;

  std::vector<double> line, out, z;
  std::vector<std::size_t> v;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const auto n = s[axis];
    const auto a_ext = axis == 0 ? s.h : s.d;
    const auto b_ext = axis == 2 ? s.h : s.w;
    line.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < a_ext; ++i)
      for (std::int64_t j = 0; j < b_ext; ++j) {
        auto at = [&](std::int64_t k) -> double& {
          if (axis == 0) return sq(k, i, j);
          if (axis == 1) return sq(i, k, j);
          return sq(i, j, k);
        };
        for (std::int64_t k = 0; k < n; ++k) line[static_cast<std::size_t>(k)] = at(k);
        envelope_1d(line, spacing[axis], out, v, z);
        for (std::int64_t k = 0; k < n; ++k) at(k) = out[static_cast<std::size_t>(k)];
      }
  }
  for (auto& d : sq.values()) d = std::sqrt(d);
  return sq;
}

double percentile(std::vector<double>& values, double q) {
  if (values.empty()) throw EmptyInput("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

std::optional<double> hd95(const Grid3<Label>& pred, const Grid3<Label>& ref, Label class_id,
                           const Spacing& spacing) {
  check_same_shape(pred, ref);
  for (double sp : spacing)
    if (!(sp > 0.0)) throw InvalidConfig("spacing must be positive");
  const auto bp = boundary(pred, class_id);
  const auto br = boundary(ref, class_id);
  const auto count = [](const Grid3<Label>& g) {
    return std::count(g.values().begin(), g.values().end(), Label{1});
  };
  if (count(bp) == 0 || count(br) == 0) return std::nullopt;

  const auto to_r = distance_to(br, spacing);
  const auto to_p = distance_to(bp, spacing);
  std::vector<double> pooled;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    if (bp.values()[i]) pooled.push_back(to_r.values()[i]);
    if (br.values()[i]) pooled.push_back(to_p.values()[i]);
  }
  return percentile(pooled, 0.95);
}

std::optional<double> hd95(const LabelMap& pred, const LabelMap& ref, Label class_id, const Spacing& spacing) {
  if (class_id >= ref.num_classes()) throw LabelOutOfRange("class id " + std::to_string(class_id) + " is invalid");
  return hd95(pred.labels, ref.labels, class_id, spacing);
}

}  // namespace oarseg
