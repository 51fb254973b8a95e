#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oarseg/errors.hpp"

namespace oarseg {

/// Extent of a dense 3D array, slowest axis first (depth, height, width).
struct Shape3 {
  std::int64_t d = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;

  std::int64_t operator[](std::size_t axis) const { return axis == 0 ? d : (axis == 1 ? h : w); }
  std::int64_t& operator[](std::size_t axis) { return axis == 0 ? d : (axis == 1 ? h : w); }
  std::int64_t volume() const { return d * h * w; }
  bool valid() const { return d >= 1 && h >= 1 && w >= 1; }

  friend bool operator==(const Shape3&, const Shape3&) = default;
};

std::string to_string(const Shape3& s);

/// Dense, C-ordered 3D array with value semantics.
template <typename T>
class Grid3 {
 public:
  using value_type = T;

  Grid3() = default;
  explicit Grid3(Shape3 shape, T fill = T{})
      : shape_(shape), data_(static_cast<std::size_t>(shape.volume()), fill) {}
  Grid3(Shape3 shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != shape_.volume()) {
      throw ShapeMismatch("grid data size " + std::to_string(data_.size()) +
                          " does not match shape " + to_string(shape_));
    }
  }

  const Shape3& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(std::int64_t z, std::int64_t y, std::int64_t x) const noexcept {
    return static_cast<std::size_t>((z * shape_.h + y) * shape_.w + x);
  }
  T& operator()(std::int64_t z, std::int64_t y, std::int64_t x) noexcept { return data_[index(z, y, x)]; }
  const T& operator()(std::int64_t z, std::int64_t y, std::int64_t x) const noexcept {
    return data_[index(z, y, x)];
  }
  bool contains(std::int64_t z, std::int64_t y, std::int64_t x) const noexcept {
    return z >= 0 && y >= 0 && x >= 0 && z < shape_.d && y < shape_.h && x < shape_.w;
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  Shape3 shape_{};
  std::vector<T> data_;
};

/// Half-open axis-aligned box [lo, hi) in voxel coordinates.
struct Box3 {
  std::array<std::int64_t, 3> lo{0, 0, 0};
  std::array<std::int64_t, 3> hi{0, 0, 0};

  Shape3 extent() const { return {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]}; }
  friend bool operator==(const Box3&, const Box3&) = default;
};

template <typename T>
Grid3<T> crop(const Grid3<T>& g, const Box3& box) {
  Grid3<T> out(box.extent());
  for (std::int64_t z = box.lo[0]; z < box.hi[0]; ++z)
    for (std::int64_t y = box.lo[1]; y < box.hi[1]; ++y)
      for (std::int64_t x = box.lo[2]; x < box.hi[2]; ++x)
        out(z - box.lo[0], y - box.lo[1], x - box.lo[2]) = g(z, y, x);
  return out;
}

/// Places `g` at the origin of a larger grid filled with `fill`.
template <typename T>
Grid3<T> pad_to(const Grid3<T>& g, Shape3 target, T fill) {
  Grid3<T> out(Shape3{std::max(target.d, g.shape().d), std::max(target.h, g.shape().h),
                      std::max(target.w, g.shape().w)},
               fill);
  for (std::int64_t z = 0; z < g.shape().d; ++z)
    for (std::int64_t y = 0; y < g.shape().h; ++y)
      for (std::int64_t x = 0; x < g.shape().w; ++x) out(z, y, x) = g(z, y, x);
  return out;
}

}  // namespace oarseg
