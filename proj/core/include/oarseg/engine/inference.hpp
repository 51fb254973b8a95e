#pragma once

#include <optional>

#include <torch/torch.h>

#include "oarseg/data/volume.hpp"
#include "oarseg/model/zoo.hpp"

namespace oarseg {

struct InferenceOptions {
  std::optional<Shape3> window;  // 3D sliding window; nullopt = whole volume at once
  double overlap = 0.5;
  std::int64_t slice_batch = 16;  // 2D variants: slices per forward pass
};

/// Class logits (C x D x H x W, float, CPU) for a normalised volume. 3D models run a
/// sliding window with averaged overlaps; 2D models run slice by slice along axis 0.
/// Inputs are padded to the model divisor with the volume minimum. Caller sets eval mode.
torch::Tensor predict_logits(Model& model, const Grid3<float>& volume, const InferenceOptions& opt = {});

/// Argmax of the logits as a label map with the given class names.
LabelMap logits_to_labels(const torch::Tensor& logits, const std::vector<std::string>& class_names);

/// Origins of windows of length `window` covering [0, extent) with the given stride;
/// the last window is aligned to the end.
std::vector<std::int64_t> window_starts(std::int64_t extent, std::int64_t window, std::int64_t stride);

/// Copies `g` into a D x H x W float tensor.
torch::Tensor to_tensor(const Grid3<float>& g);
torch::Tensor to_tensor(const Grid3<Label>& g);  // int64

/// Pads a (..., D, H, W) tensor at the far end of each spatial axis up to `target`.
torch::Tensor pad_spatial(const torch::Tensor& t, Shape3 target, double value);

}  // namespace oarseg
