#include "doctest.h"

#include <cmath>
#include <functional>
#include <limits>

#include "dagparse/nn.hpp"
#include "dagparse/optim.hpp"

using namespace dagparse;
using nn::Mat;

namespace {

// Central finite differences over every scalar of every parameter; loss_fn
// runs forward and backward, leaving gradients in the store.
double max_relative_error(nn::ParamStore& params, const std::function<double()>& loss_fn) {
  double worst = 0;
  params.zero_grads();
  loss_fn();
  std::vector<Mat> analytic;
  for (const auto& p : params.all()) analytic.push_back(p->grad);
  const double h = 1e-5;
  for (std::size_t pi = 0; pi < params.all().size(); ++pi) {
    nn::Param& p = *params.all()[pi];
    for (long c = 0; c < p.value.cols(); ++c) {
      for (long r = 0; r < p.value.rows(); ++r) {
        double saved = p.value(r, c);
        p.value(r, c) = saved + h;
        params.zero_grads();
        double up = loss_fn();
        p.value(r, c) = saved - h;
        params.zero_grads();
        double down = loss_fn();
        p.value(r, c) = saved;
        double numeric = (up - down) / (2 * h);
        double a = analytic[pi](r, c);
        double denom = std::max({std::abs(a), std::abs(numeric), 1.0});
        worst = std::max(worst, std::abs(a - numeric) / denom);
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("tape computes a small expression and its gradients") {
  nn::ParamStore params;
  nn::Param& w = params.add("w", 2, 3);
  w.value << 1, 2, 3, 4, 5, 6;
  nn::Param& b = params.add("b", 2, 1);
  b.value << 0.5, -0.5;

  nn::Tape tape;
  Mat x(3, 1);
  x << 1, -1, 2;
  int y = tape.add(tape.matmul(tape.param(w), tape.input(x)), tape.param(b));
  CHECK(tape.value(y)(0, 0) == doctest::Approx(1 - 2 + 6 + 0.5));
  CHECK(tape.value(y)(1, 0) == doctest::Approx(4 - 5 + 12 - 0.5));

  int loss = tape.pick_negsum(tape.log_softmax(y), {0});
  tape.backward(loss);
  CHECK(w.grad.rows() == 2);
  CHECK(b.grad.col(0).sum() == doctest::Approx(0.0));  // softmax gradient sums to zero
}

TEST_CASE("gradient check over composed ops") {
  nn::ParamStore params;
  Rng rng(42);
  nn::Param& w1 = params.add("w1", 4, 5);
  nn::init_glorot(w1.value, rng);
  nn::Param& b1 = params.add("b1", 4, 1);
  nn::Param& emb = params.add("emb", 5, 3);
  nn::init_embedding(emb.value, rng);
  nn::Param& w2 = params.add("w2", 3, 8);
  nn::init_glorot(w2.value, rng);

  auto loss_fn = [&]() {
    nn::Tape tape;
    int e0 = tape.lookup(emb, 1);
    int h = tape.tanh_(tape.add(tape.matmul(tape.param(w1), e0), tape.param(b1)));
    int s = tape.logistic(tape.scale(h, 0.5));
    int both = tape.concat({h, s});
    int gate = tape.cmul(both, both);
    int logits = tape.matmul(tape.param(w2), gate);
    int loss = tape.pick_negsum(tape.log_softmax(logits), {0, 2});
    double v = tape.scalar(loss);
    tape.backward(loss);
    return v;
  };
  CHECK(max_relative_error(params, loss_fn) < 1e-6);
}

TEST_CASE("lookup accumulates sparse gradients") {
  nn::ParamStore params;
  nn::Param& emb = params.add("emb", 2, 4);
  emb.value.setOnes();
  nn::Tape tape;
  int a = tape.lookup(emb, 1);
  int b = tape.lookup(emb, 1);
  int c = tape.lookup(emb, 3);
  int sum = tape.add(tape.add(a, b), c);
  int loss = tape.pick_negsum(sum, {0, 1});
  tape.backward(loss);
  CHECK(emb.grad(0, 1) == doctest::Approx(-2));
  CHECK(emb.grad(0, 3) == doctest::Approx(-1));
  CHECK(emb.grad(0, 0) == 0);
  CHECK(emb.grad(0, 2) == 0);
}

TEST_CASE("sgd applies decay and step") {
  nn::ParamStore params;
  nn::Param& p = params.add("p", 1, 1);
  p.value(0, 0) = 2.0;
  SgdOptimizer sgd(0.5, 1e-5);
  // Zero gradient: only the decay applies.
  sgd.step(params);
  CHECK(p.value(0, 0) == doctest::Approx(2.0 * (1 - 1e-5)));
  p.grad(0, 0) = 1.0;
  double before = p.value(0, 0);
  sgd.step(params);
  CHECK(p.value(0, 0) == doctest::Approx(before * (1 - 1e-5) - 0.5));
  CHECK(p.grad(0, 0) == 0);  // cleared
}

TEST_CASE("amsgrad follows the reference recursion on a scalar") {
  nn::ParamStore params;
  nn::Param& p = params.add("p", 1, 1);
  p.value(0, 0) = 1.0;
  const double alpha = 0.001, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  AmsgradOptimizer opt(alpha, b1, b2, /*weight_decay=*/0, eps);

  // Hand recursion.
  double m = 0, v = 0, vhat = 0, theta = 1.0;
  std::vector<double> grads = {1.0, -0.5, 2.0, 0.25};
  for (double g : grads) {
    p.grad(0, 0) = g;
    opt.step(params);
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    vhat = std::max(vhat, v);
    theta -= alpha * m / (std::sqrt(vhat) + eps);
    CHECK(p.value(0, 0) == doctest::Approx(theta).epsilon(1e-12));
  }
  // First step magnitude matches -alpha * m1 / (sqrt(vhat1) + eps).
  double first = -alpha * (0.1) / (std::sqrt(0.001) + eps);
  CHECK(first < 0);
}

TEST_CASE("amsgrad converges on a quadratic bowl") {
  nn::ParamStore params;
  nn::Param& p = params.add("p", 1, 1);
  p.value(0, 0) = 1.0;
  AmsgradOptimizer opt(0.01, 0.9, 0.999, 0);
  for (int step = 0; step < 10000; ++step) {
    p.grad(0, 0) = p.value(0, 0);  // d/dx of x^2/2
    opt.step(params);
    if (std::abs(p.value(0, 0)) < 1e-6) break;
  }
  CHECK(std::abs(p.value(0, 0)) < 1e-6);
}

TEST_CASE("dropout mask statistics and scaling") {
  Rng rng(55);
  const double p = 0.4;
  long zeros = 0, total = 0;
  for (int i = 0; i < 1000; ++i) {
    Mat m = nn::dropout_mask(100, p, rng);
    for (long r = 0; r < m.rows(); ++r) {
      ++total;
      if (m(r, 0) == 0.0) {
        ++zeros;
      } else {
        CHECK(m(r, 0) == doctest::Approx(1.0 / (1.0 - p)));
      }
    }
  }
  double rate = static_cast<double>(zeros) / static_cast<double>(total);
  CHECK(rate == doctest::Approx(p).epsilon(0.025));  // within +-0.01
}

TEST_CASE("non-finite gradients abort with the parameter name") {
  nn::ParamStore params;
  nn::Param& p = params.add("bad", 1, 1);
  p.grad(0, 0) = std::numeric_limits<double>::infinity();
  SgdOptimizer sgd(0.1, 0);
  CHECK_THROWS_WITH_AS(sgd.step(params), doctest::Contains("bad"), InternalError);
}
