#pragma once

#include <vector>

#include "dagparse/nn.hpp"

namespace dagparse {

// Both optimizers decay all weights multiplicatively by `weight_decay` at
// each update, then apply their step, then clear gradients.
class SgdOptimizer {
 public:
  SgdOptimizer(double lr, double weight_decay) : lr_(lr), weight_decay_(weight_decay) {}
  void step(nn::ParamStore& params);

 private:
  double lr_;
  double weight_decay_;
};

// AMSGrad: m_t = b1*m + (1-b1)*g, v_t = b2*v + (1-b2)*g^2,
// vhat = max(vhat, v_t), update = -alpha * m_t / (sqrt(vhat) + eps).
class AmsgradOptimizer {
 public:
  AmsgradOptimizer(double alpha, double beta1, double beta2, double weight_decay,
                   double eps = 1e-8)
      : alpha_(alpha), beta1_(beta1), beta2_(beta2), weight_decay_(weight_decay), eps_(eps) {}
  void step(nn::ParamStore& params);

 private:
  double alpha_, beta1_, beta2_, weight_decay_, eps_;
  std::vector<nn::Mat> m_, v_, vhat_;
};

}  // namespace dagparse
