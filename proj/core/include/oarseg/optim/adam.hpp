#pragma once

#include <memory>
#include <vector>

#include <torch/torch.h>

namespace oarseg {

/// ADAM (betas 0.9 / 0.999, eps 1e-8, no weight decay) whose learning rate the
/// scheduler rewrites before every step. Drive it from a single training thread.
class Optimizer {
 public:
  Optimizer(std::vector<torch::Tensor> params, double lr0);

  void set_lr(double lr);
  double lr() const { return lr_; }
  void zero_grad();
  void step();

  torch::optim::Adam& adam() { return adam_; }

 private:
  torch::optim::Adam adam_;
  double lr_;
};

/// Throws InvalidConfig when lr0 <= 0.
std::unique_ptr<Optimizer> make_optimizer(std::vector<torch::Tensor> params, double lr0);

}  // namespace oarseg
