#include "dagparse/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dagparse {

using nlohmann::json;
using nn::Mat;

const char* family_name(Family f) {
  static const char* names[kFamilyCount] = {"word",   "pos",    "dep",        "ne_type",
                                            "shape",  "prefix", "suffix",     "punct",
                                            "edge_label", "action", "node_label", "node_category"};
  return names[static_cast<int>(f)];
}

Vocab::Vocab() {
  entries_ = {"<none>", "<unk>"};
  index_ = {{"<none>", 0}, {"<unk>", 1}};
  counts_ = {0, 0};
}

int Vocab::add(const std::string& s) {
  if (s.empty()) {
    ++counts_[0];
    return 0;
  }
  auto it = index_.find(s);
  if (it != index_.end()) {
    ++counts_[static_cast<std::size_t>(it->second)];
    return it->second;
  }
  int idx = static_cast<int>(entries_.size());
  entries_.push_back(s);
  counts_.push_back(1);
  index_[s] = idx;
  return idx;
}

int Vocab::get(const std::string& s) const {
  if (s.empty()) return 0;
  auto it = index_.find(s);
  return it == index_.end() ? 1 : it->second;
}

void Vocab::set_entries(std::vector<std::string> entries, std::vector<long> counts) {
  entries_ = std::move(entries);
  counts_ = std::move(counts);
  index_.clear();
  for (int i = 0; i < static_cast<int>(entries_.size()); ++i) index_[entries_[static_cast<std::size_t>(i)]] = i;
}

double word_drop_probability(long count, double alpha) {
  if (alpha <= 0) return 0;
  return alpha / (static_cast<double>(count) + alpha);
}

bool word_drop_draw(long count, double alpha, Rng& rng) {
  return rng.bernoulli(word_drop_probability(count, alpha));
}

ModelDims ModelDims::tiny(int scale) {
  ModelDims d;
  d.learned_word = 2 * scale;
  d.pretrained_word = 0;
  d.pos = scale / 2 + 1;
  d.dep = scale / 2 + 1;
  d.ne = 2;
  d.punct = 1;
  d.action = 3;
  d.edge_label = scale / 2 + 1;
  d.node_label = 2;
  d.node_category = 2;
  d.shape = 2;
  d.prefix = 2;
  d.suffix = 2;
  d.task_layers = 1;
  d.task_hidden = 2 * scale;
  d.shared_layers = 1;
  d.shared_hidden = 2 * scale;
  d.main_mlp_layers = 2;
  d.aux_mlp_layers = 1;
  d.mlp_hidden = 4 * scale;
  return d;
}

namespace {

json dims_to_json(const ModelDims& d) {
  return json{{"learned_word", d.learned_word},
              {"pretrained_word", d.pretrained_word},
              {"pos", d.pos},
              {"dep", d.dep},
              {"ne", d.ne},
              {"punct", d.punct},
              {"action", d.action},
              {"edge_label", d.edge_label},
              {"node_label", d.node_label},
              {"node_category", d.node_category},
              {"shape", d.shape},
              {"prefix", d.prefix},
              {"suffix", d.suffix},
              {"task_layers", d.task_layers},
              {"task_hidden", d.task_hidden},
              {"shared_layers", d.shared_layers},
              {"shared_hidden", d.shared_hidden},
              {"main_mlp_layers", d.main_mlp_layers},
              {"aux_mlp_layers", d.aux_mlp_layers},
              {"mlp_hidden", d.mlp_hidden}};
}

ModelDims dims_from_json(const json& j) {
  ModelDims d;
  d.learned_word = j.value("learned_word", d.learned_word);
  d.pretrained_word = j.value("pretrained_word", d.pretrained_word);
  d.pos = j.value("pos", d.pos);
  d.dep = j.value("dep", d.dep);
  d.ne = j.value("ne", d.ne);
  d.punct = j.value("punct", d.punct);
  d.action = j.value("action", d.action);
  d.edge_label = j.value("edge_label", d.edge_label);
  d.node_label = j.value("node_label", d.node_label);
  d.node_category = j.value("node_category", d.node_category);
  d.shape = j.value("shape", d.shape);
  d.prefix = j.value("prefix", d.prefix);
  d.suffix = j.value("suffix", d.suffix);
  d.task_layers = j.value("task_layers", d.task_layers);
  d.task_hidden = j.value("task_hidden", d.task_hidden);
  d.shared_layers = j.value("shared_layers", d.shared_layers);
  d.shared_hidden = j.value("shared_hidden", d.shared_hidden);
  d.main_mlp_layers = j.value("main_mlp_layers", d.main_mlp_layers);
  d.aux_mlp_layers = j.value("aux_mlp_layers", d.aux_mlp_layers);
  d.mlp_hidden = j.value("mlp_hidden", d.mlp_hidden);
  return d;
}

json dropout_to_json(const DropoutConfig& d) {
  return json{{"mlp_p", d.mlp_p},           {"recurrent_p", d.recurrent_p},
              {"word_alpha", d.word_alpha}, {"tag_alpha", d.tag_alpha},
              {"dep_alpha", d.dep_alpha},   {"node_dropout_p", d.node_dropout_p}};
}

DropoutConfig dropout_from_json(const json& j) {
  DropoutConfig d;
  d.mlp_p = j.value("mlp_p", d.mlp_p);
  d.recurrent_p = j.value("recurrent_p", d.recurrent_p);
  d.word_alpha = j.value("word_alpha", d.word_alpha);
  d.tag_alpha = j.value("tag_alpha", d.tag_alpha);
  d.dep_alpha = j.value("dep_alpha", d.dep_alpha);
  d.node_dropout_p = j.value("node_dropout_p", d.node_dropout_p);
  return d;
}

Family cat_family(char code) {
  switch (code) {
    case 'e': return Family::EdgeLabel;
    case 'n': return Family::NodeLabel;
    case 'c': return Family::NodeCategory;
    case 'p': return Family::Punct;
    case 'A': return Family::Action;
    default: throw InternalError(std::string("no embedding family for code '") + code + "'");
  }
}

bool code_uses_encoder(char code) {
  switch (code) {
    case 'w': case 't': case 'd': case 'T': case '#': case '^': case '$':
      return true;
    default:
      return false;
  }
}

}  // namespace

Model::Model(ModelDims dims, DropoutConfig dropout, std::vector<ModelTask> tasks,
             std::uint64_t seed)
    : dims_(dims), dropout_(dropout), tasks_(std::move(tasks)), seed_(seed), init_rng_(seed) {
  if (tasks_.empty()) throw DataError("model: no tasks");
  for (int i = 0; i < static_cast<int>(tasks_.size()); ++i) {
    if (tasks_[static_cast<std::size_t>(i)].is_main) {
      if (main_task_ >= 0) throw DataError("model: more than one main task");
      main_task_ = i;
    }
  }
  if (main_task_ < 0) throw DataError("model: no main task");
  for (auto& t : tasks_) t.inventory = transition_inventory(t.config);
}

int Model::task_index(const std::string& name) const {
  for (int i = 0; i < task_count(); ++i)
    if (tasks_[static_cast<std::size_t>(i)].config.name == name) return i;
  throw DataError("model: unknown task '" + name + "'");
}

int Model::inventory_index(int task_index, const Transition& t) const {
  const TaskNet& net = nets_.at(static_cast<std::size_t>(task_index));
  auto it = net.index.find({static_cast<int>(t.kind), t.label});
  return it == net.index.end() ? -1 : it->second;
}

int Model::encoder_output_dim(int task_index) const {
  int shared = 2 * dims_.shared_hidden;
  return tasks_.at(static_cast<std::size_t>(task_index)).is_main
             ? shared + 2 * dims_.task_hidden
             : shared;
}

void Model::observe_graph(const UnifiedGraph& g) {
  if (frozen_) throw InternalError("observe_graph after freeze");
  for (const Token& t : g.tokens) {
    vocabs_[static_cast<std::size_t>(Family::Word)].add(t.text);
    vocabs_[static_cast<std::size_t>(Family::Pos)].add(t.pos);
    vocabs_[static_cast<std::size_t>(Family::Dep)].add(t.dep);
    vocabs_[static_cast<std::size_t>(Family::NeType)].add(t.ne_type);
    vocabs_[static_cast<std::size_t>(Family::Shape)].add(t.shape);
    vocabs_[static_cast<std::size_t>(Family::Prefix)].add(utf8_prefix(t.text, 1));
    vocabs_[static_cast<std::size_t>(Family::Suffix)].add(utf8_suffix(t.text, 3));
    if (t.is_punct) vocabs_[static_cast<std::size_t>(Family::Punct)].add(t.text);
  }
  for (const Edge& e : g.edges()) vocabs_[static_cast<std::size_t>(Family::EdgeLabel)].add(e.label);
  for (const Node& n : g.nodes()) {
    vocabs_[static_cast<std::size_t>(Family::NodeLabel)].add(n.label);
    vocabs_[static_cast<std::size_t>(Family::NodeCategory)].add(n.category);
  }
}

void Model::load_pretrained(const std::string& path) {
  if (frozen_) throw InternalError("load_pretrained after freeze");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pretrained vectors " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<double> vec;
    double x;
    while (ss >> x) vec.push_back(x);
    if (static_cast<int>(vec.size()) != dims_.pretrained_word)
      throw DataError("pretrained vector for '" + word + "' has dimension " +
                      std::to_string(vec.size()));
    pretrained_file_[word] = std::move(vec);
    vocabs_[static_cast<std::size_t>(Family::Word)].add(word);
  }
  have_pretrained_file_ = true;
}

int Model::token_input_dim() const {
  return dims_.learned_word + dims_.pretrained_word + dims_.pos + dims_.dep + dims_.ne +
         dims_.punct + dims_.shape + dims_.prefix + dims_.suffix;
}

Model::Encoder Model::build_encoder(const std::string& prefix, int layers, int hidden) {
  Encoder enc;
  enc.hidden = hidden;
  int input = token_input_dim();
  for (int l = 0; l < layers; ++l) {
    for (int dir = 0; dir < 2; ++dir) {
      std::string base = prefix + "l" + std::to_string(l) + (dir ? ".bwd." : ".fwd.");
      LstmDir d;
      auto mk = [&](const char* name, int rows, int cols, bool glorot) {
        nn::Param& p = params_.add(base + name, rows, cols);
        if (glorot)
          nn::init_glorot(p.value, init_rng_);
        return &p;
      };
      d.wi = mk("Wi", hidden, input + hidden, true);
      d.wf = mk("Wf", hidden, input + hidden, true);
      d.wo = mk("Wo", hidden, input + hidden, true);
      d.wg = mk("Wg", hidden, input + hidden, true);
      d.bi = mk("bi", hidden, 1, false);
      d.bf = mk("bf", hidden, 1, false);
      d.bo = mk("bo", hidden, 1, false);
      d.bg = mk("bg", hidden, 1, false);
      (dir ? enc.bwd : enc.fwd).push_back(d);
    }
    input = 2 * hidden;
  }
  return enc;
}

void Model::compute_state_dims() {
  nets_.resize(tasks_.size());
  for (std::size_t ti = 0; ti < tasks_.size(); ++ti) {
    ModelTask& mt = tasks_[ti];
    TaskNet& net = nets_[ti];
    net.used_slots.clear();
    for (const auto& [name, codes] : mt.features.node_rows) {
      for (int s = 0; s < kSlotCount; ++s)
        if (name == slot_name(static_cast<Slot>(s))) {
          net.used_slots.push_back(s);
          break;
        }
    }
    int cat_dim = 0, numerics = 0;
    for (const FeatureTemplate& t : mt.features.templates()) {
      if (t.numeric) {
        ++numerics;
      } else if (t.code && !code_uses_encoder(t.code)) {
        switch (cat_family(t.code)) {
          case Family::EdgeLabel: cat_dim += dims_.edge_label; break;
          case Family::NodeLabel: cat_dim += dims_.node_label; break;
          case Family::NodeCategory: cat_dim += dims_.node_category; break;
          case Family::Punct: cat_dim += dims_.punct; break;
          case Family::Action: cat_dim += dims_.action; break;
          default: break;
        }
      }
    }
    net.state_dim = static_cast<int>(net.used_slots.size()) *
                        encoder_output_dim(static_cast<int>(ti)) +
                    cat_dim + numerics;
  }
}

void Model::freeze() {
  if (frozen_) throw InternalError("model already frozen");
  for (int k = 0; k < kTransitionKindCount; ++k)
    vocabs_[static_cast<std::size_t>(Family::Action)].add(kind_name(static_cast<TransitionKind>(k)));
  vocabs_[static_cast<std::size_t>(Family::Punct)].add("0");
  vocabs_[static_cast<std::size_t>(Family::Punct)].add("1");
  for (const ModelTask& mt : tasks_)
    for (const Transition& t : mt.inventory)
      if (!t.label.empty()) vocabs_[static_cast<std::size_t>(Family::EdgeLabel)].add(t.label);

  auto table_dim = [&](Family f) {
    switch (f) {
      case Family::Word: return dims_.learned_word;
      case Family::Pos: return dims_.pos;
      case Family::Dep: return dims_.dep;
      case Family::NeType: return dims_.ne;
      case Family::Shape: return dims_.shape;
      case Family::Prefix: return dims_.prefix;
      case Family::Suffix: return dims_.suffix;
      case Family::Punct: return dims_.punct;
      case Family::EdgeLabel: return dims_.edge_label;
      case Family::Action: return dims_.action;
      case Family::NodeLabel: return dims_.node_label;
      case Family::NodeCategory: return dims_.node_category;
    }
    return 0;
  };
  for (int f = 0; f < kFamilyCount; ++f) {
    int dim = table_dim(static_cast<Family>(f));
    if (dim <= 0) continue;
    nn::Param& p = params_.add(std::string("emb.") + family_name(static_cast<Family>(f)), dim,
                               vocabs_[static_cast<std::size_t>(f)].size());
    nn::init_embedding(p.value, init_rng_);
    p.value.col(0).setZero();  // <none> starts at zero but remains learnable
    tables_[static_cast<std::size_t>(f)] = &p;
  }
  if (dims_.pretrained_word > 0 && have_pretrained_file_) {
    const Vocab& words = vocabs_[static_cast<std::size_t>(Family::Word)];
    pretrained_ = &params_.add("emb.word_pretrained", dims_.pretrained_word, words.size());
    for (int i = 0; i < words.size(); ++i) {
      auto it = pretrained_file_.find(words.entries()[static_cast<std::size_t>(i)]);
      if (it == pretrained_file_.end()) continue;
      for (int r = 0; r < dims_.pretrained_word; ++r)
        pretrained_->value(r, i) = it->second[static_cast<std::size_t>(r)];
    }
  }

  main_encoder_ = build_encoder("enc.main.", dims_.task_layers, dims_.task_hidden);
  shared_encoder_ = build_encoder("enc.shared.", dims_.shared_layers, dims_.shared_hidden);

  compute_state_dims();
  for (std::size_t ti = 0; ti < tasks_.size(); ++ti) {
    ModelTask& mt = tasks_[ti];
    TaskNet& net = nets_[ti];
    std::string base = "task." + mt.config.name + ".";
    int layers = mt.is_main ? dims_.main_mlp_layers : dims_.aux_mlp_layers;
    int in = net.state_dim;
    for (int l = 0; l < layers; ++l) {
      nn::Param& w = params_.add(base + "mlp.l" + std::to_string(l) + ".W", dims_.mlp_hidden, in);
      nn::init_glorot(w.value, init_rng_);
      nn::Param& b = params_.add(base + "mlp.l" + std::to_string(l) + ".b", dims_.mlp_hidden, 1);
      net.mlp_w.push_back(&w);
      net.mlp_b.push_back(&b);
      in = dims_.mlp_hidden;
    }
    net.out_w = &params_.add(base + "out.W", static_cast<int>(mt.inventory.size()), in);
    nn::init_glorot(net.out_w->value, init_rng_);
    net.out_b = &params_.add(base + "out.b", static_cast<int>(mt.inventory.size()), 1);
    for (int i = 0; i < static_cast<int>(mt.inventory.size()); ++i) {
      const Transition& t = mt.inventory[static_cast<std::size_t>(i)];
      net.index[{static_cast<int>(t.kind), t.label}] = i;
    }
  }
  frozen_ = true;
}

int Model::embed_or_zero(nn::Tape& tape, Family f, const std::string& value, bool training,
                         Rng* rng, double alpha, bool force_zero) {
  nn::Param* table = tables_[static_cast<std::size_t>(f)];
  if (!table) throw InternalError(std::string("no embedding table for ") + family_name(f));
  if (force_zero) return tape.zeros(static_cast<int>(table->value.rows()));
  const Vocab& vocab = vocabs_[static_cast<std::size_t>(f)];
  int idx = vocab.get(value);
  if (training && rng && alpha > 0 && idx != 0 &&
      word_drop_draw(vocab.count(idx), alpha, *rng))
    return tape.zeros(static_cast<int>(table->value.rows()));
  return tape.lookup(*table, idx);
}

int Model::token_input(nn::Tape& tape, const Token& t, bool training, Rng* rng) {
  std::vector<int> parts;
  const Vocab& words = vocabs_[static_cast<std::size_t>(Family::Word)];
  int widx = words.get(t.text);
  bool drop_word = training && rng && dropout_.word_alpha > 0 &&
                   word_drop_draw(words.count(widx), dropout_.word_alpha, *rng);
  if (drop_word) {
    parts.push_back(tape.zeros(dims_.learned_word));
  } else {
    parts.push_back(tape.lookup(*tables_[static_cast<std::size_t>(Family::Word)], widx));
  }
  if (dims_.pretrained_word > 0) {
    if (pretrained_ && !drop_word) {
      parts.push_back(tape.lookup(*pretrained_, widx));
    } else {
      parts.push_back(tape.zeros(dims_.pretrained_word));
    }
  }
  parts.push_back(embed_or_zero(tape, Family::Pos, t.pos, training, rng, dropout_.tag_alpha));
  parts.push_back(embed_or_zero(tape, Family::Dep, t.dep, training, rng, dropout_.dep_alpha));
  parts.push_back(embed_or_zero(tape, Family::NeType, t.ne_type, false, nullptr, 0));
  parts.push_back(embed_or_zero(tape, Family::Punct, t.is_punct ? "1" : "0", false, nullptr, 0));
  parts.push_back(embed_or_zero(tape, Family::Shape, t.shape, false, nullptr, 0));
  parts.push_back(
      embed_or_zero(tape, Family::Prefix, utf8_prefix(t.text, 1), false, nullptr, 0));
  parts.push_back(
      embed_or_zero(tape, Family::Suffix, utf8_suffix(t.text, 3), false, nullptr, 0));
  return tape.concat(parts);
}

std::vector<int> Model::run_encoder(nn::Tape& tape, const Encoder& enc,
                                    const std::vector<int>& inputs, bool training, Rng* rng) {
  std::vector<int> layer_in = inputs;
  int n = static_cast<int>(inputs.size());
  for (std::size_t l = 0; l < enc.fwd.size(); ++l) {
    if (l > 0 && training && rng && dropout_.recurrent_p > 0) {
      // Variational mask between stacked layers: one mask per sequence.
      Mat mask = nn::dropout_mask(tape.value(layer_in[0]).rows(), dropout_.recurrent_p, *rng);
      int mask_expr = tape.input(mask);
      for (int t = 0; t < n; ++t)
        layer_in[static_cast<std::size_t>(t)] =
            tape.cmul(layer_in[static_cast<std::size_t>(t)], mask_expr);
    }
    auto run_dir = [&](const LstmDir& d, bool backwards) {
      std::vector<int> hs(static_cast<std::size_t>(n));
      int h = tape.zeros(enc.hidden);
      int c = tape.zeros(enc.hidden);
      for (int step = 0; step < n; ++step) {
        int t = backwards ? n - 1 - step : step;
        int x = tape.concat({layer_in[static_cast<std::size_t>(t)], h});
        int i = tape.logistic(tape.add(tape.matmul(tape.param(*d.wi), x), tape.param(*d.bi)));
        int f = tape.logistic(tape.add(tape.matmul(tape.param(*d.wf), x), tape.param(*d.bf)));
        int o = tape.logistic(tape.add(tape.matmul(tape.param(*d.wo), x), tape.param(*d.bo)));
        int g = tape.tanh_(tape.add(tape.matmul(tape.param(*d.wg), x), tape.param(*d.bg)));
        c = tape.add(tape.cmul(f, c), tape.cmul(i, g));
        h = tape.cmul(o, tape.tanh_(c));
        hs[static_cast<std::size_t>(t)] = h;
      }
      return hs;
    };
    std::vector<int> fw = run_dir(enc.fwd[l], false);
    std::vector<int> bw = run_dir(enc.bwd[l], true);
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
      out[static_cast<std::size_t>(t)] =
          tape.concat({fw[static_cast<std::size_t>(t)], bw[static_cast<std::size_t>(t)]});
    layer_in = std::move(out);
  }
  return layer_in;
}

Model::Sentence Model::begin_sentence(nn::Tape& tape, const std::vector<Token>& tokens,
                                      const std::string& task, bool training, Rng* rng) {
  if (!frozen_) throw InternalError("model not frozen");
  Sentence ctx;
  ctx.task = task_index(task);
  ctx.training = training;
  std::vector<int> inputs;
  inputs.reserve(tokens.size());
  for (const Token& t : tokens) inputs.push_back(token_input(tape, t, training, rng));
  std::vector<int> shared = run_encoder(tape, shared_encoder_, inputs, training, rng);
  if (tasks_[static_cast<std::size_t>(ctx.task)].is_main) {
    std::vector<int> main = run_encoder(tape, main_encoder_, inputs, training, rng);
    for (std::size_t t = 0; t < tokens.size(); ++t)
      ctx.enc.push_back(tape.concat({main[t], shared[t]}));
  } else {
    ctx.enc = std::move(shared);
  }
  return ctx;
}

int Model::roll_node_dropout(const FeatureVector& fv, int task_index, Rng& rng) const {
  if (dropout_.node_dropout_p <= 0 || !rng.bernoulli(dropout_.node_dropout_p)) return -1;
  const TaskNet& net = nets_.at(static_cast<std::size_t>(task_index));
  std::vector<int> present;
  for (int slot : net.used_slots)
    if (fv.slot_node[static_cast<std::size_t>(slot)] >= 0) present.push_back(slot);
  if (present.empty()) return -1;
  return present[static_cast<std::size_t>(rng.below(present.size()))];
}

int Model::state_logits(nn::Tape& tape, const Sentence& ctx, const FeatureVector& fv, Rng* rng,
                        int force_drop_slot) {
  const ModelTask& mt = tasks_.at(static_cast<std::size_t>(ctx.task));
  const TaskNet& net = nets_.at(static_cast<std::size_t>(ctx.task));
  const auto& templates = mt.features.templates();
  if (fv.values.size() != templates.size())
    throw DataError("feature arity mismatch: got " + std::to_string(fv.values.size()) +
                    ", expected " + std::to_string(templates.size()));

  int drop_slot = force_drop_slot;
  if (drop_slot == -2)
    drop_slot = (ctx.training && rng) ? roll_node_dropout(fv, ctx.task, *rng) : -1;

  int enc_dim = encoder_output_dim(ctx.task);
  std::vector<int> parts;
  for (int slot : net.used_slots) {
    int pos = fv.head_position[static_cast<std::size_t>(slot)];
    if (slot == drop_slot || pos <= 0) {
      parts.push_back(tape.zeros(enc_dim));
    } else {
      parts.push_back(ctx.enc.at(static_cast<std::size_t>(pos - 1)));
    }
  }
  std::vector<double> nums;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const FeatureTemplate& t = templates[i];
    const FeatureValue& v = fv.values[i];
    bool dropped = t.group >= 0 && t.group == drop_slot;
    if (t.numeric) {
      nums.push_back(dropped || v.none ? 0.0 : v.num);
    } else if (t.code && !code_uses_encoder(t.code)) {
      parts.push_back(embed_or_zero(tape, cat_family(t.code), v.none ? "" : v.cat, false, nullptr,
                                    0, dropped));
    }
  }
  if (!nums.empty()) {
    Mat m(static_cast<long>(nums.size()), 1);
    for (std::size_t i = 0; i < nums.size(); ++i) m(static_cast<long>(i), 0) = nums[i];
    parts.push_back(tape.input(std::move(m)));
  }

  int x = tape.concat(parts);
  for (std::size_t l = 0; l < net.mlp_w.size(); ++l) {
    x = tape.tanh_(tape.add(tape.matmul(tape.param(*net.mlp_w[l]), x), tape.param(*net.mlp_b[l])));
    if (ctx.training && rng && dropout_.mlp_p > 0)
      x = tape.cmul(x, tape.input(nn::dropout_mask(tape.value(x).rows(), dropout_.mlp_p, *rng)));
  }
  return tape.add(tape.matmul(tape.param(*net.out_w), x), tape.param(*net.out_b));
}

int Model::state_logprobs(nn::Tape& tape, const Sentence& ctx, const FeatureVector& fv, Rng* rng,
                          int force_drop_slot) {
  return tape.log_softmax(state_logits(tape, ctx, fv, rng, force_drop_slot));
}

int Model::step_loss(nn::Tape& tape, const Sentence& ctx, const FeatureVector& fv,
                     const std::vector<Transition>& optimal, Rng* rng, int* logprobs_out) {
  if (optimal.empty()) throw DataError("step_loss: empty optimal set");
  int lp = state_logprobs(tape, ctx, fv, rng);
  if (logprobs_out) *logprobs_out = lp;
  std::vector<int> picks;
  for (const Transition& t : optimal) {
    int idx = inventory_index(ctx.task, t);
    if (idx < 0)
      throw InternalError("optimal transition " + t.to_string() + " not in task inventory");
    picks.push_back(idx);
  }
  return tape.pick_negsum(lp, picks);
}

Eigen::VectorXd Model::transition_logprobs(nn::Tape& tape, const Sentence& ctx,
                                           const FeatureVector& fv) {
  int lp = state_logprobs(tape, ctx, fv, nullptr, -1);
  return tape.value(lp).col(0);
}

std::vector<Eigen::VectorXd> Model::encode_values(const std::vector<Token>& tokens,
                                                  const std::string& task) {
  nn::Tape tape;
  Sentence ctx = begin_sentence(tape, tokens, task, false, nullptr);
  std::vector<Eigen::VectorXd> out;
  for (int e : ctx.enc) out.push_back(tape.value(e).col(0));
  return out;
}

std::string Model::fingerprint() const {
  std::string all;
  for (const ModelTask& t : tasks_) {
    all += t.config.to_json_text();
    all += t.features.to_json_text();
  }
  std::ostringstream os;
  os << std::hex << fnv1a(all);
  return os.str();
}

// ---------------------------------------------------------------------------
// Checkpoint I/O: versioned header (JSON) + raw named tensors.

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

constexpr char kMagic[4] = {'D', 'G', 'P', 'M'};

}  // namespace

void Model::save(const std::string& path) const {
  if (!frozen_) throw InternalError("save before freeze");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open checkpoint " + path);
  json header;
  header["dims"] = dims_to_json(dims_);
  header["dropout"] = dropout_to_json(dropout_);
  header["seed"] = seed_;
  header["fingerprint"] = fingerprint();
  header["has_pretrained"] = pretrained_ != nullptr;
  json jtasks = json::array();
  for (const ModelTask& t : tasks_)
    jtasks.push_back({{"config", t.config.to_json_text()},
                      {"features", t.features.to_json_text()},
                      {"is_main", t.is_main}});
  header["tasks"] = std::move(jtasks);
  json jvocab = json::object(), jcounts = json::object();
  for (int f = 0; f < kFamilyCount; ++f) {
    jvocab[family_name(static_cast<Family>(f))] = vocabs_[static_cast<std::size_t>(f)].entries();
    jcounts[family_name(static_cast<Family>(f))] = vocabs_[static_cast<std::size_t>(f)].counts();
  }
  header["vocab"] = std::move(jvocab);
  header["counts"] = std::move(jcounts);
  std::string header_text = header.dump();

  out.write(kMagic, 4);
  write_u32(out, 1);  // version
  write_u64(out, header_text.size());
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& p : params_.all()) {
    write_u32(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_u32(out, static_cast<std::uint32_t>(p->value.rows()));
    write_u32(out, static_cast<std::uint32_t>(p->value.cols()));
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p->value.size())));
  }
  if (!out) throw DataError("failed writing checkpoint " + path);
}

Model Model::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != std::string(kMagic, 4))
    throw DataError("not a model checkpoint: " + path);
  std::uint32_t version = read_u32(in);
  if (version != 1) throw DataError("unsupported checkpoint version " + std::to_string(version));
  std::uint64_t header_len = read_u64(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  json header = json::parse(header_text);

  std::vector<ModelTask> tasks;
  for (const json& jt : header.at("tasks")) {
    ModelTask t;
    t.config = TaskConfig::from_json_text(jt.at("config").get<std::string>());
    t.features = FeatureConfig::from_json_text(jt.at("features").get<std::string>());
    t.is_main = jt.at("is_main").get<bool>();
    tasks.push_back(std::move(t));
  }
  Model m(dims_from_json(header.at("dims")), dropout_from_json(header.at("dropout")),
          std::move(tasks), header.value("seed", 1ULL));
  for (int f = 0; f < kFamilyCount; ++f) {
    const char* name = family_name(static_cast<Family>(f));
    std::vector<std::string> entries = header.at("vocab").at(name).get<std::vector<std::string>>();
    std::vector<long> counts = header.at("counts").at(name).get<std::vector<long>>();
    m.vocabs_[static_cast<std::size_t>(f)].set_entries(std::move(entries), std::move(counts));
  }
  m.have_pretrained_file_ = header.value("has_pretrained", false);
  m.freeze();
  while (true) {
    std::uint32_t name_len = read_u32(in);
    if (!in) break;
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    std::uint32_t rows = read_u32(in), cols = read_u32(in);
    nn::Param* p = m.params_.find(name);
    if (!p) throw DataError("checkpoint tensor '" + name + "' has no home");
    if (p->value.rows() != rows || p->value.cols() != cols)
      throw DataError("checkpoint tensor '" + name + "' shape mismatch");
    in.read(reinterpret_cast<char*>(p->value.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p->value.size())));
    if (!in) throw DataError("truncated checkpoint " + path);
  }
  return m;
}

}  // namespace dagparse
