#include "dagparse/train.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dagparse/features.hpp"
#include "dagparse/optim.hpp"

namespace dagparse {

EpochSampler::EpochSampler(std::vector<std::size_t> corpus_sizes, std::size_t main_size)
    : main_size_(main_size) {
  if (main_size_ == 0) throw DataError("sample_epoch: empty main corpus");
  for (std::size_t size : corpus_sizes) {
    if (size == 0) throw DataError("sample_epoch: empty task corpus");
    std::vector<std::size_t> deck(size);
    for (std::size_t i = 0; i < size; ++i) deck[i] = i;
    decks_.push_back(std::move(deck));
    cursors_.push_back(size);  // forces a shuffle on first use
  }
}

std::vector<std::pair<int, std::size_t>> EpochSampler::next_epoch(Rng& rng) {
  std::vector<std::pair<int, std::size_t>> stream;
  for (std::size_t task = 0; task < decks_.size(); ++task) {
    for (std::size_t k = 0; k < main_size_; ++k) {
      if (cursors_[task] >= decks_[task].size()) {
        rng.shuffle(decks_[task]);
        cursors_[task] = 0;
      }
      stream.emplace_back(static_cast<int>(task), decks_[task][cursors_[task]++]);
    }
  }
  rng.shuffle(stream);
  return stream;
}

namespace {

const std::vector<std::string>& head_priority_for(const ModelTask& mt) {
  return mt.config.head_priority.empty() ? default_head_priority() : mt.config.head_priority;
}

}  // namespace

ParseResult greedy_parse(Model& model, const std::vector<Token>& tokens, const std::string& task,
                         const std::string& graph_id) {
  int ti = model.task_index(task);
  const ModelTask& mt = model.task(ti);
  ParserState state = initial_state(tokens, graph_id);
  nn::Tape tape;
  Model::Sentence ctx = model.begin_sentence(tape, tokens, task, false, nullptr);

  long bound = 10L * static_cast<long>(tokens.size()) + 20;
  ParseResult out;
  while (!state.finished && static_cast<long>(state.history.size()) < bound) {
    FeatureVector fv = extract(state, mt.features, head_priority_for(mt));
    Eigen::VectorXd scores = model.transition_logprobs(tape, ctx, fv);
    int best = -1;
    for (int i = 0; i < static_cast<int>(mt.inventory.size()); ++i) {
      if (best >= 0 && scores(i) <= scores(best)) continue;
      if (legal(state, mt.inventory[static_cast<std::size_t>(i)], mt.config)) best = i;
    }
    if (best < 0) break;  // no legal transition; clean up below
    apply(state, mt.inventory[static_cast<std::size_t>(best)], mt.config);
  }
  if (!state.finished) {
    // Step bound exceeded: attach whatever lacks a parent and return the
    // best-effort graph with a warning flag.
    out.truncated = true;
    std::string label;
    if (mt.config.labeled) {
      label = mt.config.orphan_label;
      const auto& labels = mt.config.labels_for(TransitionKind::RightEdge);
      if (label.empty() && !labels.empty()) label = labels.front();
    }
    for (int i = 0; i < state.graph.node_count(); ++i)
      if (i != state.graph.root() && state.graph.primary_parent_edge(i) < 0)
        state.graph.add_edge(state.graph.root(), i, label, false);
  }
  out.graph = std::move(state.graph);
  return out;
}

double sentence_loss(Model& model, const UnifiedGraph& gold, int task_index, Rng& rng,
                     double loss_weight) {
  const ModelTask& mt = model.task(task_index);
  Oracle oracle(gold, mt.config);
  ParserState state = initial_state(gold.tokens, gold.id);
  nn::Tape tape;
  Model::Sentence ctx = model.begin_sentence(tape, gold.tokens, mt.config.name, true, &rng);

  std::vector<int> losses;
  while (!state.finished) {
    std::vector<Transition> optimal = oracle.optimal_set(state);
    FeatureVector fv = extract(state, mt.features, head_priority_for(mt));
    int logprobs = -1;
    int loss = model.step_loss(tape, ctx, fv, optimal, &rng, &logprobs);
    losses.push_back(loss);
    // The transition performed in training is the highest-scoring optimal one.
    const nn::Mat& lp = tape.value(logprobs);
    int chosen = -1;
    double best_score = 0;
    for (const Transition& t : optimal) {
      int idx = model.inventory_index(task_index, t);
      if (chosen < 0 || lp(idx, 0) > best_score) {
        chosen = idx;
        best_score = lp(idx, 0);
      }
    }
    apply(state, model.task(task_index).inventory[static_cast<std::size_t>(chosen)], mt.config);
  }
  int total = losses.front();
  for (std::size_t i = 1; i < losses.size(); ++i) total = tape.add(total, losses[i]);
  if (loss_weight != 1.0) total = tape.scale(total, loss_weight);
  double value = tape.scalar(total);
  if (!std::isfinite(value)) throw InternalError("non-finite training loss on '" + gold.id + "'");
  tape.backward(total);
  return value;
}

TrainResult train_model(Model& model, const std::vector<TaskCorpus>& corpora,
                        const TrainingSchedule& schedule, Rng& rng, std::ostream* log) {
  int main_corpus = -1;
  std::vector<std::size_t> sizes;
  std::vector<int> task_of;
  for (const TaskCorpus& c : corpora) {
    int ti = model.task_index(c.task);
    task_of.push_back(ti);
    sizes.push_back(c.train.size());
    if (ti == model.main_task_index()) main_corpus = static_cast<int>(task_of.size()) - 1;
  }
  if (main_corpus < 0) throw DataError("train: no corpus for the main task");
  const TaskCorpus& main = corpora[static_cast<std::size_t>(main_corpus)];
  if (main.dev.empty()) throw DataError("train: main task has no dev corpus");

  EpochSampler sampler(sizes, main.train.size());
  SgdOptimizer sgd(schedule.sgd_lr, schedule.weight_decay);
  AmsgradOptimizer ams(schedule.ams_alpha, schedule.beta1, schedule.beta2, schedule.weight_decay);

  TrainResult result;
  std::vector<nn::Mat> best = model.params().snapshot_values();
  const ModelTask& main_task = model.task(model.main_task_index());

  auto evaluate_dev = [&]() {
    std::vector<UnifiedGraph> pred;
    pred.reserve(main.dev.size());
    for (const UnifiedGraph& gold : main.dev)
      pred.push_back(greedy_parse(model, gold.tokens, main_task.config.name, gold.id).graph);
    return corpus_score(pred, main.dev, main_task.config.labeled);
  };

  int total_epochs = schedule.epochs_sgd + schedule.epochs_amsgrad;
  for (int epoch = 1; epoch <= total_epochs; ++epoch) {
    bool sgd_phase = epoch <= schedule.epochs_sgd;
    double epoch_loss = 0;
    int in_batch = 0;
    auto flush = [&]() {
      if (in_batch == 0) return;
      // Per-sentence gradients are summed; normalize to the batch mean and
      // clip the global norm.
      double sqnorm = 0;
      for (auto& p : model.params().all()) {
        p->grad /= static_cast<double>(in_batch);
        sqnorm += p->grad.squaredNorm();
      }
      if (schedule.clip_norm > 0 && sqnorm > schedule.clip_norm * schedule.clip_norm) {
        double scale = schedule.clip_norm / std::sqrt(sqnorm);
        for (auto& p : model.params().all()) p->grad *= scale;
      }
      if (sgd_phase)
        sgd.step(model.params());
      else
        ams.step(model.params());
      in_batch = 0;
    };
    for (auto [corpus_idx, sent_idx] : sampler.next_epoch(rng)) {
      const TaskCorpus& c = corpora[static_cast<std::size_t>(corpus_idx)];
      int ti = task_of[static_cast<std::size_t>(corpus_idx)];
      double w = ti == model.main_task_index() ? 1.0 : schedule.aux_loss_weight;
      epoch_loss += sentence_loss(model, c.train[sent_idx], ti, rng, w);
      if (++in_batch >= schedule.minibatch) flush();
    }
    flush();

    EpochRecord rec;
    rec.epoch = epoch;
    rec.phase = sgd_phase ? "sgd" : "amsgrad";
    rec.loss = epoch_loss;
    rec.dev = evaluate_dev();
    if (log) {
      log->setf(std::ios::fixed);
      log->precision(4);
      *log << "epoch " << rec.epoch << " [" << rec.phase << "] loss " << rec.loss << " dev primary "
           << rec.dev.primary.precision << "/" << rec.dev.primary.recall << "/"
           << rec.dev.primary.f1 << " remote " << rec.dev.remote.precision << "/"
           << rec.dev.remote.recall << "/" << rec.dev.remote.f1 << " avg "
           << rec.dev.average_f1() << "\n";
    }
    if (rec.dev.average_f1() > result.best_f1) {  // ties keep the earliest epoch
      result.best_f1 = rec.dev.average_f1();
      result.best_epoch = epoch;
      best = model.params().snapshot_values();
    }
    result.log.push_back(std::move(rec));
  }
  model.params().restore_values(best);
  return result;
}

}  // namespace dagparse
