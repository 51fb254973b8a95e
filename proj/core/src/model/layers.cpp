#include "oarseg/model/layers.hpp"

#include <cmath>

#include "oarseg/errors.hpp"

namespace oarseg::nn {
namespace {

std::vector<std::int64_t> rep(std::int64_t dims, std::int64_t v) { return std::vector<std::int64_t>(dims, v); }

}  // namespace

ConvImpl::ConvImpl(const ConvSpec& spec) : spec_(spec) {
  if (spec.dims != 2 && spec.dims != 3) throw InvalidConfig("convolutions are 2D or 3D");
  if (spec.in % spec.groups != 0 || spec.out % spec.groups != 0) throw InvalidConfig("channels not divisible by groups");
  std::vector<std::int64_t> shape;
  if (spec.transposed) {
    shape = {spec.in, spec.out / spec.groups};
  } else {
    shape = {spec.out, spec.in / spec.groups};
  }
  for (std::int64_t d = 0; d < spec.dims; ++d) shape.push_back(spec.kernel);
  weight_ = register_parameter("weight", torch::empty(shape));
  // He fan-in initialisation.
  const double fan_in =
      static_cast<double>(spec.in / spec.groups) * std::pow(static_cast<double>(spec.kernel), spec.dims);
  {
    torch::NoGradGuard guard;
    weight_.normal_(0.0, std::sqrt(2.0 / fan_in));
  }
  if (spec.bias) bias_ = register_parameter("bias", torch::zeros({spec.out}));
}

torch::Tensor ConvImpl::forward(const torch::Tensor& x) {
  const auto& s = spec_;
  if (s.transposed) {
    return torch::convolution(x, weight_, bias_, rep(s.dims, s.stride), rep(s.dims, 0), rep(s.dims, 1), true,
                              rep(s.dims, 0), s.groups);
  }
  const auto pad = s.dilation * (s.kernel - 1) / 2;
  return torch::convolution(x, weight_, bias_, rep(s.dims, s.stride), rep(s.dims, pad), rep(s.dims, s.dilation),
                            false, rep(s.dims, 0), s.groups);
}

NormImpl::NormImpl(NormKind kind, std::int64_t channels) : kind_(kind) {
  weight_ = register_parameter("weight", torch::ones({channels}));
  bias_ = register_parameter("bias", torch::zeros({channels}));
  if (kind == NormKind::batch) {
    running_mean_ = register_buffer("running_mean", torch::zeros({channels}));
    running_var_ = register_buffer("running_var", torch::ones({channels}));
  }
}

torch::Tensor NormImpl::forward(const torch::Tensor& x) {
  if (kind_ == NormKind::instance) {
    return torch::instance_norm(x, weight_, bias_, {}, {}, /*use_input_stats=*/true, 0.1, 1e-5, false);
  }
  return torch::batch_norm(x, weight_, bias_, running_mean_, running_var_, is_training(), 0.1, 1e-5, false);
}

torch::Tensor activate(const torch::Tensor& x, Activation a) { return a == Activation::relu ? torch::relu(x) : torch::silu(x); }

ConvNormActImpl::ConvNormActImpl(const ConvSpec& spec, NormKind norm, Activation act) : act_(act) {
  conv_ = register_module("conv", Conv(spec));
  norm_ = register_module("norm", Norm(norm, spec.out));
}

torch::Tensor ConvNormActImpl::forward(const torch::Tensor& x) { return activate(norm_(conv_(x)), act_); }

DoubleConvImpl::DoubleConvImpl(std::int64_t dims, std::int64_t in, std::int64_t out, NormKind norm,
                               std::int64_t dilation) {
  first_ = register_module("first", std::make_shared<ConvNormActImpl>(
                                        ConvSpec{.dims = dims, .in = in, .out = out, .dilation = dilation}, norm));
  second_ = register_module("second", std::make_shared<ConvNormActImpl>(
                                          ConvSpec{.dims = dims, .in = out, .out = out, .dilation = dilation}, norm));
}

torch::Tensor DoubleConvImpl::forward(const torch::Tensor& x) { return second_->forward(first_->forward(x)); }

ResidualUnitImpl::ResidualUnitImpl(std::int64_t dims, std::int64_t in, std::int64_t out, NormKind norm,
                                   std::int64_t stride, std::int64_t dilation) {
  conv1_ = register_module("conv1", Conv(ConvSpec{.dims = dims, .in = in, .out = out, .stride = stride,
                                                  .dilation = dilation}));
  norm1_ = register_module("norm1", Norm(norm, out));
  conv2_ = register_module("conv2", Conv(ConvSpec{.dims = dims, .in = out, .out = out, .dilation = dilation}));
  norm2_ = register_module("norm2", Norm(norm, out));
  if (in != out || stride != 1) {
    skip_conv_ = register_module("skip_conv", Conv(ConvSpec{.dims = dims, .in = in, .out = out, .kernel = 1,
                                                            .stride = stride}));
    skip_norm_ = register_module("skip_norm", Norm(norm, out));
  }
}

torch::Tensor ResidualUnitImpl::forward(const torch::Tensor& x) {
  auto y = norm2_(conv2_(torch::relu(norm1_(conv1_(x)))));
  auto shortcut = skip_conv_ ? skip_norm_(skip_conv_(x)) : x;
  return torch::relu(y + shortcut);
}

SqueezeExciteImpl::SqueezeExciteImpl(std::int64_t dims, std::int64_t channels, std::int64_t reduced) {
  reduce_ = register_module("reduce", Conv(ConvSpec{.dims = dims, .in = channels, .out = reduced, .kernel = 1,
                                                    .bias = true}));
  expand_ = register_module("expand", Conv(ConvSpec{.dims = dims, .in = reduced, .out = channels, .kernel = 1,
                                                    .bias = true}));
}

torch::Tensor SqueezeExciteImpl::forward(const torch::Tensor& x) {
  std::vector<std::int64_t> spatial;
  for (std::int64_t d = 2; d < x.dim(); ++d) spatial.push_back(d);
  auto s = x.mean(spatial, /*keepdim=*/true);
  s = torch::sigmoid(expand_(torch::silu(reduce_(s))));
  return x * s;
}

MBConvImpl::MBConvImpl(std::int64_t dims, std::int64_t in, std::int64_t out, NormKind norm, std::int64_t stride,
                       std::int64_t expand_ratio, std::int64_t dilation)
    : residual_(stride == 1 && in == out) {
  const auto mid = in * expand_ratio;
  if (expand_ratio != 1) {
    expand_conv_ = register_module("expand_conv", Conv(ConvSpec{.dims = dims, .in = in, .out = mid, .kernel = 1}));
    expand_norm_ = register_module("expand_norm", Norm(norm, mid));
  }
  depthwise_conv_ = register_module(
      "depthwise_conv",
      Conv(ConvSpec{.dims = dims, .in = mid, .out = mid, .stride = stride, .dilation = dilation, .groups = mid}));
  depthwise_norm_ = register_module("depthwise_norm", Norm(norm, mid));
  se_ = register_module("se", SqueezeExcite(dims, mid, std::max<std::int64_t>(1, in / 4)));
  project_conv_ = register_module("project_conv", Conv(ConvSpec{.dims = dims, .in = mid, .out = out, .kernel = 1}));
  project_norm_ = register_module("project_norm", Norm(norm, out));
}

torch::Tensor MBConvImpl::forward(const torch::Tensor& x) {
  auto y = x;
  if (expand_conv_) y = torch::silu(expand_norm_(expand_conv_(y)));
  y = torch::silu(depthwise_norm_(depthwise_conv_(y)));
  y = se_(y);
  y = project_norm_(project_conv_(y));
  return residual_ ? y + x : y;
}

torch::Tensor MaxPoolImpl::forward(const torch::Tensor& x) {
  return dims_ == 2 ? torch::max_pool2d(x, {2, 2}) : torch::max_pool3d(x, {2, 2, 2});
}

void StageImpl::append(std::shared_ptr<BlockImpl> block) {
  blocks_.push_back(register_module(std::to_string(blocks_.size()), std::move(block)));
}

torch::Tensor StageImpl::forward(torch::Tensor x) {
  for (auto& b : blocks_) x = b->forward(x);
  return x;
}

}  // namespace oarseg::nn
