#include "dagparse/nn.hpp"

#include <cmath>

namespace dagparse::nn {

Param& ParamStore::add(const std::string& name, int rows, int cols) {
  if (find(name)) throw InternalError("duplicate parameter name " + name);
  auto p = std::make_unique<Param>();
  p->name = name;
  p->value = Mat::Zero(rows, cols);
  p->grad = Mat::Zero(rows, cols);
  p->owner = this;
  params_.push_back(std::move(p));
  return *params_.back();
}

Param* ParamStore::find(const std::string& name) {
  for (auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

std::size_t ParamStore::count_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p->zero_grad();
}

std::vector<Mat> ParamStore::snapshot_values() const {
  std::vector<Mat> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParamStore::restore_values(const std::vector<Mat>& values) {
  if (values.size() != params_.size()) throw InternalError("snapshot size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) params_[i]->value = values[i];
}

int Tape::push(TapeNode n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(Mat v) {
  TapeNode n{.op = Op::Input, .value = std::move(v)};
  return push(std::move(n));
}

int Tape::zeros(int rows) { return input(Mat::Zero(rows, 1)); }

int Tape::param(Param& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return it->second;
  if (p.owner) p.owner->note_touch(p.name);
  TapeNode n{.op = Op::Param, .p = &p};  // value read through the store
  int id = push(std::move(n));
  param_nodes_[&p] = id;
  return id;
}

int Tape::lookup(Param& p, int col) {
  if (col < 0 || col >= p.value.cols())
    throw InternalError("lookup out of range in " + p.name);
  if (p.owner) p.owner->note_touch(p.name);
  TapeNode n{.op = Op::Lookup, .value = p.value.col(col), .p = &p, .col = col};
  return push(std::move(n));
}

int Tape::matmul(int a, int b) {
  TapeNode n{.op = Op::Matmul, .value = value(a) * value(b), .args = {a, b}};
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  TapeNode n{.op = Op::Add, .value = value(a) + value(b), .args = {a, b}};
  return push(std::move(n));
}

int Tape::concat(const std::vector<int>& parts) {
  long rows = 0;
  for (int p : parts) rows += value(p).rows();
  Mat v(rows, 1);
  long at = 0;
  for (int p : parts) {
    v.block(at, 0, value(p).rows(), 1) = value(p);
    at += value(p).rows();
  }
  TapeNode n{.op = Op::Concat, .value = std::move(v), .args = parts};
  return push(std::move(n));
}

int Tape::tanh_(int a) {
  TapeNode n{.op = Op::Tanh, .value = value(a).array().tanh().matrix(), .args = {a}};
  return push(std::move(n));
}

int Tape::logistic(int a) {
  TapeNode n{.op = Op::Logistic,
             .value = (1.0 / (1.0 + (-value(a).array()).exp())).matrix(),
             .args = {a}};
  return push(std::move(n));
}

int Tape::cmul(int a, int b) {
  TapeNode n{.op = Op::Cmul,
             .value = (value(a).array() * value(b).array()).matrix(),
             .args = {a, b}};
  return push(std::move(n));
}

int Tape::scale(int a, double s) {
  TapeNode n{.op = Op::Scale, .value = value(a) * s, .args = {a}, .s = s};
  return push(std::move(n));
}

int Tape::log_softmax(int a) {
  const Mat& x = value(a);
  double mx = x.maxCoeff();
  double lse = mx + std::log((x.array() - mx).exp().sum());
  TapeNode n{.op = Op::LogSoftmax, .value = (x.array() - lse).matrix(), .args = {a}};
  return push(std::move(n));
}

int Tape::pick_negsum(int a, const std::vector<int>& indices) {
  if (indices.empty()) throw InternalError("pick_negsum: empty index set");
  double s = 0;
  for (int i : indices) s -= value(a)(i, 0);
  TapeNode n{.op = Op::PickNegSum, .value = Mat::Constant(1, 1, s), .args = {a}};
  n.picks = indices;
  return push(std::move(n));
}

void Tape::backward(int node) {
  if (value(node).size() != 1) throw InternalError("backward: loss is not a scalar");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Mat& v = value(static_cast<int>(i));
    nodes_[i].grad = Mat::Zero(v.rows(), v.cols());
  }
  nodes_[static_cast<std::size_t>(node)].grad(0, 0) = 1.0;
  for (int i = node; i >= 0; --i) {
    TapeNode& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.isZero(0)) continue;
    switch (n.op) {
      case Op::Input:
      case Op::Zeros:
        break;
      case Op::Param:
        n.p->grad += n.grad;
        break;
      case Op::Lookup:
        n.p->grad.col(n.col) += n.grad;
        break;
      case Op::Matmul: {
        TapeNode& a = nodes_[static_cast<std::size_t>(n.args[0])];
        TapeNode& b = nodes_[static_cast<std::size_t>(n.args[1])];
        a.grad += n.grad * value(n.args[1]).transpose();
        b.grad += value(n.args[0]).transpose() * n.grad;
        break;
      }
      case Op::Add:
        nodes_[static_cast<std::size_t>(n.args[0])].grad += n.grad;
        nodes_[static_cast<std::size_t>(n.args[1])].grad += n.grad;
        break;
      case Op::Concat: {
        long at = 0;
        for (int part : n.args) {
          TapeNode& p = nodes_[static_cast<std::size_t>(part)];
          long rows = value(part).rows();
          p.grad += n.grad.block(at, 0, rows, 1);
          at += rows;
        }
        break;
      }
      case Op::Tanh: {
        TapeNode& a = nodes_[static_cast<std::size_t>(n.args[0])];
        a.grad.array() += n.grad.array() * (1.0 - n.value.array().square());
        break;
      }
      case Op::Logistic: {
        TapeNode& a = nodes_[static_cast<std::size_t>(n.args[0])];
        a.grad.array() += n.grad.array() * n.value.array() * (1.0 - n.value.array());
        break;
      }
      case Op::Cmul: {
        TapeNode& a = nodes_[static_cast<std::size_t>(n.args[0])];
        TapeNode& b = nodes_[static_cast<std::size_t>(n.args[1])];
        a.grad.array() += n.grad.array() * value(n.args[1]).array();
        b.grad.array() += n.grad.array() * value(n.args[0]).array();
        break;
      }
      case Op::Scale:
        nodes_[static_cast<std::size_t>(n.args[0])].grad += n.grad * n.s;
        break;
      case Op::LogSoftmax: {
        TapeNode& a = nodes_[static_cast<std::size_t>(n.args[0])];
        double gsum = n.grad.sum();
        a.grad.array() += n.grad.array() - n.value.array().exp() * gsum;
        break;
      }
      case Op::PickNegSum: {
        TapeNode& a = nodes_[static_cast<std::size_t>(n.args[0])];
        for (int idx : n.picks) a.grad(idx, 0) -= n.grad(0, 0);
        break;
      }
    }
  }
}

void init_glorot(Mat& m, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (long c = 0; c < m.cols(); ++c)
    for (long r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-limit, limit);
}

void init_embedding(Mat& m, Rng& rng) {
  double limit = 1.0 / std::sqrt(static_cast<double>(m.rows()));
  for (long c = 0; c < m.cols(); ++c)
    for (long r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-limit, limit);
}

Mat dropout_mask(long rows, double p, Rng& rng) {
  Mat m(rows, 1);
  double keep = 1.0 - p;
  for (long r = 0; r < rows; ++r) m(r, 0) = rng.bernoulli(p) ? 0.0 : 1.0 / keep;
  return m;
}

}  // namespace dagparse::nn
