#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dagparse/util.hpp"

namespace dagparse::nn {

using Mat = Eigen::MatrixXd;

class ParamStore;

struct Param {
  std::string name;
  Mat value;
  Mat grad;
  const ParamStore* owner = nullptr;

  void zero_grad() { grad.setZero(); }
};

// Owns named parameters; optionally traces which ones a forward pass reads.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(ParamStore&& o) noexcept { *this = std::move(o); }
  ParamStore& operator=(ParamStore&& o) noexcept {
    params_ = std::move(o.params_);
    trace_ = std::move(o.trace_);
    tracing_ = o.tracing_;
    for (auto& p : params_) p->owner = this;
    return *this;
  }
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  Param& add(const std::string& name, int rows, int cols);
  Param* find(const std::string& name);
  const std::vector<std::unique_ptr<Param>>& all() const { return params_; }
  std::size_t count_scalars() const;

  void zero_grads();
  void start_trace() { trace_.clear(); tracing_ = true; }
  std::set<std::string> stop_trace() { tracing_ = false; return std::move(trace_); }
  void note_touch(const std::string& name) const {
    if (tracing_) trace_.insert(name);
  }

  // Deep snapshot of parameter values (for best-epoch checkpointing).
  std::vector<Mat> snapshot_values() const;
  void restore_values(const std::vector<Mat>& values);

 private:
  std::vector<std::unique_ptr<Param>> params_;
  mutable std::set<std::string> trace_;
  bool tracing_ = false;
};

// Reverse-mode autodiff over column vectors and matrices. Values are
// computed eagerly; backward() accumulates into Param::grad. Parameter
// leaves reference the store without copying and are cached per tape.
class Tape {
 public:
  int input(Mat v);                      // constant leaf
  int zeros(int rows);                   // constant zero column
  int param(Param& p);                   // parameter leaf (cached, no copy)
  int lookup(Param& p, int col);         // embedding column with sparse grad
  int matmul(int a, int b);
  int add(int a, int b);
  int concat(const std::vector<int>& parts);  // stack column vectors
  int tanh_(int a);
  int logistic(int a);
  int cmul(int a, int b);
  int scale(int a, double s);
  int log_softmax(int a);
  int pick_negsum(int a, const std::vector<int>& indices);  // -sum of entries

  const Mat& value(int node) const {
    const TapeNode& n = nodes_[static_cast<std::size_t>(node)];
    return n.op == Op::Param ? n.p->value : n.value;
  }
  double scalar(int node) const { return value(node)(0, 0); }
  void backward(int node);  // seeds d(node)=1; node must be 1x1

 private:
  enum class Op {
    Input, Zeros, Param, Lookup, Matmul, Add, Concat, Tanh, Logistic, Cmul, Scale, LogSoftmax,
    PickNegSum,
  };
  struct TapeNode {
    Op op;
    Mat value;
    Mat grad;
    std::vector<int> args;
    Param* p = nullptr;
    int col = 0;
    double s = 0;
    std::vector<int> picks;
  };
  std::vector<TapeNode> nodes_;
  std::map<const Param*, int> param_nodes_;

  int push(TapeNode n);
};

// Glorot-style uniform init for matrices, zeros for biases, uniform small
// range for embedding tables.
void init_glorot(Mat& m, Rng& rng);
void init_embedding(Mat& m, Rng& rng);

// Inverted dropout mask: zero with probability p, else 1/(1-p).
Mat dropout_mask(long rows, double p, Rng& rng);

}  // namespace dagparse::nn
