#pragma once

// Brute-force reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "oarseg/data/volume.hpp"

namespace oarseg::oracle {

struct Voxel {
  std::int64_t z, y, x;
};

inline std::vector<Voxel> members(const Grid3<Label>& g, Label c) {
  std::vector<Voxel> out;
  const auto s = g.shape();
  for (std::int64_t z = 0; z < s.d; ++z)
    for (std::int64_t y = 0; y < s.h; ++y)
      for (std::int64_t x = 0; x < s.w; ++x)
        if (g(z, y, x) == c) out.push_back({z, y, x});
  return out;
}

inline double dice(const Grid3<Label>& p, const Grid3<Label>& r, Label c) {
  std::set<std::int64_t> a, b;
  const auto s = p.shape();
  for (const auto& v : members(p, c)) a.insert((v.z * s.h + v.y) * s.w + v.x);
  for (const auto& v : members(r, c)) b.insert((v.z * s.h + v.y) * s.w + v.x);
  if (a.empty() && b.empty()) return 1.0;
  std::size_t both = 0;
  for (auto i : a) both += b.count(i);
  return 2.0 * static_cast<double>(both) / static_cast<double>(a.size() + b.size());
}

/// Members with a 6-neighbour outside the set; positions off the grid are outside.
inline std::vector<Voxel> surface(const Grid3<Label>& g, Label c) {
  std::vector<Voxel> out;
  const int off[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (const auto& v : members(g, c)) {
    for (const auto& o : off) {
      const auto z = v.z + o[0], y = v.y + o[1], x = v.x + o[2];
      if (!g.contains(z, y, x) || g(z, y, x) != c) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// All-pairs directed surface distances in both directions, pooled, 95th percentile.
inline std::optional<double> hd95(const Grid3<Label>& p, const Grid3<Label>& r, Label c, const Spacing& sp) {
  const auto a = surface(p, c), b = surface(r, c);
  if (a.empty() || b.empty()) return std::nullopt;
  std::vector<double> d;
  auto directed = [&](const std::vector<Voxel>& from, const std::vector<Voxel>& to) {
    for (const auto& u : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& v : to) {
        const double dz = (u.z - v.z) * sp[0], dy = (u.y - v.y) * sp[1], dx = (u.x - v.x) * sp[2];
        best = std::min(best, dz * dz + dy * dy + dx * dx);
      }
      d.push_back(std::sqrt(best));
    }
  };
  directed(a, b);
  directed(b, a);
  return quantile(d, 0.95);
}

/// Random label map: speckle noise, a union of random balls, or empty.
inline Grid3<Label> random_labels(Shape3 s, int classes, std::mt19937_64& rng) {
  Grid3<Label> g(s);
  const auto kind = rng() % 5;
  if (kind == 0) return g;
  if (kind == 1) {
    std::uniform_int_distribution<int> u(0, classes - 1);
    for (auto& v : g.values()) v = static_cast<Label>(u(rng));
    return g;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int balls = 1 + static_cast<int>(rng() % 4);
  for (int b = 0; b < balls; ++b) {
    const auto label = static_cast<Label>(1 + rng() % static_cast<unsigned>(classes - 1));
    const double cz = unit(rng) * s.d, cy = unit(rng) * s.h, cx = unit(rng) * s.w;
    const double rad = 0.5 + unit(rng) * 5.0;
    for (std::int64_t z = 0; z < s.d; ++z)
      for (std::int64_t y = 0; y < s.h; ++y)
        for (std::int64_t x = 0; x < s.w; ++x) {
          const double dz = z - cz, dy = y - cy, dx = x - cx;
          if (dz * dz + dy * dy + dx * dx <= rad * rad) g(z, y, x) = label;
        }
  }
  return g;
}

struct MetricSuiteResult {
  int pairs = 0;
  int dice_mismatches = 0;
  int hd95_mismatches = 0;
  double worst_hd95_error = 0.0;
};

}  // namespace oarseg::oracle
