#include "oarseg/engine/inference.hpp"

#include <algorithm>
#include <cstring>

#include "oarseg/data/patches.hpp"
#include "oarseg/errors.hpp"

namespace oarseg {

torch::Tensor to_tensor(const Grid3<float>& g) {
  const auto s = g.shape();
  auto t = torch::empty({s.d, s.h, s.w}, torch::kFloat32);
  std::memcpy(t.data_ptr<float>(), g.data(), g.values().size() * sizeof(float));
  return t;
}

torch::Tensor to_tensor(const Grid3<Label>& g) {
  const auto s = g.shape();
  auto t = torch::empty({s.d, s.h, s.w}, torch::kUInt8);
  std::memcpy(t.data_ptr<std::uint8_t>(), g.data(), g.values().size());
  return t.to(torch::kInt64);
}

torch::Tensor pad_spatial(const torch::Tensor& t, Shape3 target, double value) {
  const auto n = t.dim();
  const auto d = t.size(n - 3), h = t.size(n - 2), w = t.size(n - 1);
  if (d == target.d && h == target.h && w == target.w) return t;
  return torch::constant_pad_nd(t, {0, target.w - w, 0, target.h - h, 0, target.d - d}, value);
}

std::vector<std::int64_t> window_starts(std::int64_t extent, std::int64_t window, std::int64_t stride) {
  if (window >= extent) return {0};
  std::vector<std::int64_t> out;
  for (std::int64_t s = 0; s + window < extent; s += stride) out.push_back(s);
  out.push_back(extent - window);
  return out;
}

namespace {

torch::Tensor predict_3d(Model& model, const torch::Tensor& vol, float pad_value, const InferenceOptions& opt) {
  const auto div = model.config().divisor();
  const Shape3 native{vol.size(0), vol.size(1), vol.size(2)};
  const auto C = model.config().num_classes;
  if (!opt.window) {
    const Shape3 padded{round_up(native.d, div), round_up(native.h, div), round_up(native.w, div)};
    auto x = pad_spatial(vol, padded, pad_value).unsqueeze(0).unsqueeze(0);
    auto y = model.forward(x)[0];
    return y.slice(1, 0, native.d).slice(2, 0, native.h).slice(3, 0, native.w).contiguous();
  }
  const auto win = *opt.window;
  const Shape3 padded{std::max(native.d, win.d), std::max(native.h, win.h), std::max(native.w, win.w)};
  auto x = pad_spatial(vol, padded, pad_value);
  auto sum = torch::zeros({C, padded.d, padded.h, padded.w}, torch::kFloat32);
  auto count = torch::zeros({1, padded.d, padded.h, padded.w}, torch::kFloat32);
  auto stride = [&](std::int64_t w) { return std::max<std::int64_t>(1, static_cast<std::int64_t>(w * (1.0 - opt.overlap))); };
  for (auto z : window_starts(padded.d, win.d, stride(win.d))) {
    for (auto y0 : window_starts(padded.h, win.h, stride(win.h))) {
      for (auto x0 : window_starts(padded.w, win.w, stride(win.w))) {
        auto patch = x.slice(0, z, z + win.d).slice(1, y0, y0 + win.h).slice(2, x0, x0 + win.w);
        auto logits = model.forward(patch.unsqueeze(0).unsqueeze(0))[0];
        sum.slice(1, z, z + win.d).slice(2, y0, y0 + win.h).slice(3, x0, x0 + win.w) += logits;
        count.slice(1, z, z + win.d).slice(2, y0, y0 + win.h).slice(3, x0, x0 + win.w) += 1.0f;
      }
    }
  }
  return (sum / count).slice(1, 0, native.d).slice(2, 0, native.h).slice(3, 0, native.w).contiguous();
}

torch::Tensor predict_2d(Model& model, const torch::Tensor& vol, float pad_value, const InferenceOptions& opt) {
  const auto div = model.config().divisor();
  const auto D = vol.size(0), H = vol.size(1), W = vol.size(2);
  const auto Hp = round_up(H, div), Wp = round_up(W, div);
  auto slices = torch::constant_pad_nd(vol, {0, Wp - W, 0, Hp - H}, pad_value).unsqueeze(1);  // D x 1 x Hp x Wp
  std::vector<torch::Tensor> out;
  const auto step = std::max<std::int64_t>(1, opt.slice_batch);
  for (std::int64_t s = 0; s < D; s += step) {
    out.push_back(model.forward(slices.slice(0, s, std::min(D, s + step))));
  }
  auto logits = torch::cat(out, 0);  // D x C x Hp x Wp
  return logits.permute({1, 0, 2, 3}).slice(2, 0, H).slice(3, 0, W).contiguous();
}

}  // namespace

torch::Tensor predict_logits(Model& model, const Grid3<float>& volume, const InferenceOptions& opt) {
  if (!volume.shape().valid()) throw ShapeError("cannot run inference on an empty volume");
  torch::NoGradGuard guard;
  const auto vol = to_tensor(volume);
  const auto pad_value = vol.min().item<float>();
  return model.config().dims() == 3 ? predict_3d(model, vol, pad_value, opt) : predict_2d(model, vol, pad_value, opt);
}

LabelMap logits_to_labels(const torch::Tensor& logits, const std::vector<std::string>& class_names) {
  if (logits.dim() != 4 || logits.size(0) != static_cast<std::int64_t>(class_names.size())) {
    throw ClassMismatch("logit channels do not match the class list");
  }
  auto am = logits.argmax(0).to(torch::kUInt8).contiguous();
  LabelMap out;
  out.class_names = class_names;
  out.labels = Grid3<Label>(Shape3{am.size(0), am.size(1), am.size(2)});
  std::memcpy(out.labels.data(), am.data_ptr<std::uint8_t>(), out.labels.values().size());
  return out;
}

}  // namespace oarseg
