#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dagparse/eval.hpp"
#include "dagparse/model.hpp"
#include "dagparse/oracle.hpp"

namespace dagparse {

struct TrainingSchedule {
  int epochs_sgd = 50;
  int epochs_amsgrad = 50;
  double sgd_lr = 0.1;
  double ams_alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 1e-5;
  int minibatch = 100;
  double aux_loss_weight = 1.0;
  double clip_norm = 5.0;  // global gradient-norm clip per update, 0 disables
};

struct TaskCorpus {
  std::string task;  // must name a model task
  std::vector<UnifiedGraph> train;
  std::vector<UnifiedGraph> dev;  // used for the main task only
};

// Draws the same number of examples from each task per epoch (the main
// training set size), sampling without replacement and reshuffling a corpus
// when it is exhausted; the combined stream is shuffled.
class EpochSampler {
 public:
  EpochSampler(std::vector<std::size_t> corpus_sizes, std::size_t main_size);
  // (task index, sentence index) pairs; main_size entries per task.
  std::vector<std::pair<int, std::size_t>> next_epoch(Rng& rng);

 private:
  std::vector<std::vector<std::size_t>> decks_;
  std::vector<std::size_t> cursors_;
  std::size_t main_size_;
};

struct ParseResult {
  UnifiedGraph graph;
  bool truncated = false;  // step bound hit; orphans were attached to the root
};

// Greedy decoding: highest-scoring legal transition until Finish, bounded by
// 10n + 20 steps.
ParseResult greedy_parse(Model& model, const std::vector<Token>& tokens, const std::string& task,
                         const std::string& graph_id = "");

// Oracle-driven loss for one sentence; gradients accumulate into the model
// parameters. Returns the summed step loss.
double sentence_loss(Model& model, const UnifiedGraph& gold, int task_index, Rng& rng,
                     double loss_weight = 1.0);

struct EpochRecord {
  int epoch = 0;
  std::string phase;
  double loss = 0;
  Scores dev;
};

struct TrainResult {
  int best_epoch = 0;  // 0 = initial model (no epochs improved on nothing)
  double best_f1 = -1;
  std::vector<EpochRecord> log;
};

// Two-phase training (SGD then AMSGrad) with early stopping on the main
// task's dev average labeled F1; the model is left holding the best-epoch
// parameters.
TrainResult train_model(Model& model, const std::vector<TaskCorpus>& corpora,
                        const TrainingSchedule& schedule, Rng& rng, std::ostream* log = nullptr);

}  // namespace dagparse
