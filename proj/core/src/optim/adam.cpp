#include "oarseg/optim/adam.hpp"

#include "oarseg/errors.hpp"

namespace oarseg {

Optimizer::Optimizer(std::vector<torch::Tensor> params, double lr0)
    : adam_(std::move(params),
            torch::optim::AdamOptions(lr0).betas(std::make_tuple(0.9, 0.999)).eps(1e-8).weight_decay(0.0)),
      lr_(lr0) {}

void Optimizer::set_lr(double lr) {
  lr_ = lr;
  for (auto& group : adam_.param_groups()) {
    static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
  }
}

void Optimizer::zero_grad() { adam_.zero_grad(); }

void Optimizer::step() { adam_.step(); }

std::unique_ptr<Optimizer> make_optimizer(std::vector<torch::Tensor> params, double lr0) {
  if (!(lr0 > 0.0)) throw InvalidConfig("initial learning rate must be positive");
  return std::make_unique<Optimizer>(std::move(params), lr0);
}

}  // namespace oarseg
