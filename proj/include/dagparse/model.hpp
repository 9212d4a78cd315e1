#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dagparse/features.hpp"
#include "dagparse/nn.hpp"
#include "dagparse/task.hpp"

namespace dagparse {

// Embedding and encoder dimensions. The defaults are the multitask
// hyperparameter settings; single_task() switches both encoders to 500.
struct ModelDims {
  int learned_word = 200;
  int pretrained_word = 300;
  int pos = 20;
  int dep = 10;
  int ne = 3;
  int punct = 1;
  int action = 3;
  int edge_label = 20;
  int node_label = 20;
  int node_category = 5;
  int shape = 3;
  int prefix = 3;
  int suffix = 3;
  int task_layers = 2;
  int task_hidden = 300;
  int shared_layers = 2;
  int shared_hidden = 300;
  int main_mlp_layers = 2;
  int aux_mlp_layers = 1;
  int mlp_hidden = 50;

  static ModelDims multitask() { return {}; }
  static ModelDims single_task() {
    ModelDims d;
    d.task_hidden = 500;
    d.shared_hidden = 500;
    return d;
  }
  static ModelDims tiny(int scale = 8);  // desk-scale training and tests
};

struct DropoutConfig {
  double mlp_p = 0.4;
  double recurrent_p = 0.4;
  double word_alpha = 0.2;
  double tag_alpha = 0.2;
  double dep_alpha = 0.5;
  double node_dropout_p = 0.1;

  static DropoutConfig none() { return {0, 0, 0, 0, 0, 0}; }
};

enum class Family {
  Word, Pos, Dep, NeType, Shape, Prefix, Suffix, Punct, EdgeLabel, Action, NodeLabel, NodeCategory,
};
constexpr int kFamilyCount = 12;
const char* family_name(Family f);

// String-to-index vocabulary; 0 is <none>, 1 is <unk>. Occurrence counts
// drive word dropout.
class Vocab {
 public:
  Vocab();
  int add(const std::string& s);         // inserts and counts an occurrence
  int get(const std::string& s) const;   // <unk> when missing
  int size() const { return static_cast<int>(entries_.size()); }
  long count(int index) const { return counts_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& entries() const { return entries_; }
  const std::vector<long>& counts() const { return counts_; }
  void set_entries(std::vector<std::string> entries, std::vector<long> counts);

 private:
  std::vector<std::string> entries_;
  std::map<std::string, int> index_;
  std::vector<long> counts_;
};

// Feature value w is zeroed with probability alpha / (count + alpha).
double word_drop_probability(long count, double alpha);
bool word_drop_draw(long count, double alpha, Rng& rng);

struct ModelTask {
  TaskConfig config;
  FeatureConfig features;
  bool is_main = false;
  std::vector<Transition> inventory;  // filled by the model
};

// The transition classifier: shared embeddings, a task-specific encoder for
// the main task plus a shared encoder, and per-task MLPs with softmax.
class Model {
 public:
  Model(ModelDims dims, DropoutConfig dropout, std::vector<ModelTask> tasks, std::uint64_t seed);

  // Vocabulary building happens before freeze(); freeze() allocates
  // parameters.
  void observe_graph(const UnifiedGraph& g);
  void load_pretrained(const std::string& path);  // word -> vector text file
  void freeze();
  bool frozen() const { return frozen_; }

  int task_count() const { return static_cast<int>(tasks_.size()); }
  int task_index(const std::string& name) const;
  const ModelTask& task(int index) const { return tasks_.at(static_cast<std::size_t>(index)); }
  int main_task_index() const { return main_task_; }
  int inventory_index(int task_index, const Transition& t) const;  // -1 when absent
  int encoder_output_dim(int task_index) const;

  // Per-sentence forward context; encoder runs once per sentence.
  struct Sentence {
    int task = 0;
    bool training = false;
    std::vector<int> enc;  // per-token encoder output exprs
  };
  Sentence begin_sentence(nn::Tape& tape, const std::vector<Token>& tokens,
                          const std::string& task, bool training, Rng* rng);

  // Logits over the task inventory. force_drop_slot: -2 rolls node dropout
  // from rng, -1 disables it, >=0 forces that slot.
  int state_logits(nn::Tape& tape, const Sentence& ctx, const FeatureVector& fv, Rng* rng,
                   int force_drop_slot = -2);
  int state_logprobs(nn::Tape& tape, const Sentence& ctx, const FeatureVector& fv, Rng* rng,
                     int force_drop_slot = -2);
  // Training loss: negative sum of log-likelihoods of the optimal set.
  // `logprobs_out` receives the log-probability node feeding the loss.
  int step_loss(nn::Tape& tape, const Sentence& ctx, const FeatureVector& fv,
                const std::vector<Transition>& optimal, Rng* rng, int* logprobs_out = nullptr);

  // Inference helpers (no dropout).
  Eigen::VectorXd transition_logprobs(nn::Tape& tape, const Sentence& ctx,
                                      const FeatureVector& fv);
  std::vector<Eigen::VectorXd> encode_values(const std::vector<Token>& tokens,
                                             const std::string& task);

  // Node dropout decision: fires with probability p, choosing uniformly
  // among present slots. Returns the slot or -1.
  int roll_node_dropout(const FeatureVector& fv, int task_index, Rng& rng) const;

  nn::ParamStore& params() { return params_; }
  const ModelDims& dims() const { return dims_; }
  const DropoutConfig& dropout() const { return dropout_; }
  Vocab& vocab(Family f) { return vocabs_[static_cast<std::size_t>(f)]; }
  const Vocab& vocab(Family f) const { return vocabs_[static_cast<std::size_t>(f)]; }
  std::string fingerprint() const;

  void save(const std::string& path) const;
  static Model load_file(const std::string& path);

 private:
  struct LstmDir {
    nn::Param *wi, *wf, *wo, *wg, *bi, *bf, *bo, *bg;
  };
  struct Encoder {
    std::vector<LstmDir> fwd, bwd;  // per layer
    int hidden = 0;
  };
  struct TaskNet {
    std::vector<nn::Param*> mlp_w, mlp_b;
    nn::Param* out_w = nullptr;
    nn::Param* out_b = nullptr;
    std::map<std::pair<int, std::string>, int> index;  // (kind, label) -> inventory index
    std::vector<int> used_slots;                        // node-row slots in order
    int state_dim = 0;
  };

  ModelDims dims_;
  DropoutConfig dropout_;
  std::vector<ModelTask> tasks_;
  int main_task_ = -1;
  std::uint64_t seed_;
  Rng init_rng_;
  bool frozen_ = false;

  std::array<Vocab, kFamilyCount> vocabs_;
  std::array<nn::Param*, kFamilyCount> tables_{};
  nn::Param* pretrained_ = nullptr;  // 300 x |word vocab|, zero rows when unseeded
  std::map<std::string, std::vector<double>> pretrained_file_;
  bool have_pretrained_file_ = false;

  Encoder main_encoder_, shared_encoder_;
  std::vector<TaskNet> nets_;
  nn::ParamStore params_;

  int token_input_dim() const;
  Encoder build_encoder(const std::string& prefix, int layers, int hidden);
  std::vector<int> run_encoder(nn::Tape& tape, const Encoder& enc, const std::vector<int>& inputs,
                               bool training, Rng* rng);
  int embed_or_zero(nn::Tape& tape, Family f, const std::string& value, bool training, Rng* rng,
                    double alpha, bool force_zero = false);
  int token_input(nn::Tape& tape, const Token& t, bool training, Rng* rng);
  void compute_state_dims();
};

}  // namespace dagparse
