#include "dagparse/optim.hpp"

namespace dagparse {

namespace {

void check_finite(const nn::Param& p) {
  if (!p.grad.allFinite())
    throw InternalError("non-finite gradient in parameter " + p.name);
}

}  // namespace

void SgdOptimizer::step(nn::ParamStore& params) {
  for (auto& p : params.all()) {
    check_finite(*p);
    p->value *= (1.0 - weight_decay_);
    p->value -= lr_ * p->grad;
    p->zero_grad();
  }
}

void AmsgradOptimizer::step(nn::ParamStore& params) {
  const auto& all = params.all();
  if (m_.size() != all.size()) {
    m_.clear();
    v_.clear();
    vhat_.clear();
    for (auto& p : all) {
      m_.push_back(nn::Mat::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(nn::Mat::Zero(p->value.rows(), p->value.cols()));
      vhat_.push_back(nn::Mat::Zero(p->value.rows(), p->value.cols()));
    }
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    nn::Param& p = *all[i];
    check_finite(p);
    p.value *= (1.0 - weight_decay_);
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.array().square().matrix();
    vhat_[i] = vhat_[i].cwiseMax(v_[i]);
    p.value.array() -= alpha_ * m_[i].array() / (vhat_[i].array().sqrt() + eps_);
    p.zero_grad();
  }
}

}  // namespace dagparse
