// Command-line surface for the toolkit: format conversion, training, greedy
// parsing, evaluation, oracle checking, and corpus statistics.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "dagparse/convert.hpp"
#include "dagparse/eval.hpp"
#include "dagparse/io.hpp"
#include "dagparse/oracle.hpp"
#include "dagparse/train.hpp"

using namespace dagparse;

namespace {

std::uint64_t default_seed() {
  const char* env = std::getenv("DAGPARSE_SEED");
  if (!env) return 1;
  return static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
}

// Tab-format files parsed per sentence block so --lenient can skip bad ones.
template <typename Reader>
std::vector<BilexicalGraph> read_blocks(const std::string& path, Reader reader, bool lenient,
                                        int& failures) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<BilexicalGraph> out;
  std::string line, block, header;
  auto flush = [&]() {
    if (block.find_first_not_of(" \t\r\n") == std::string::npos) {
      block.clear();
      return;
    }
    try {
      std::istringstream ss(header + block + "\n");
      for (auto& g : reader(ss)) out.push_back(std::move(g));
    } catch (const DataError& e) {
      std::cerr << "warning: " << e.what() << "\n";
      ++failures;
      if (!lenient) throw;
    }
    block.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (starts_with(line, "#SDP")) {
      header = line + "\n";
      continue;
    }
    if (line.empty()) {
      flush();
    } else {
      block += line + "\n";
    }
  }
  flush();
  return out;
}

int run_convert(const std::string& from, const std::string& to, const std::string& in_path,
                const std::string& out_path, bool lenient) {
  std::vector<UnifiedGraph> unified;
  int failures = 0;

  auto ingest = [&]() {
    if (from == "native" || from == "ucca" || from == "concept-json") {
      std::ifstream in(in_path);
      if (!in) throw DataError("cannot open " + in_path);
      std::string line;
      int line_number = 0;
      while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        try {
          if (from == "concept-json") {
            std::vector<std::string> warnings;
            unified.push_back(from_concept_graph(parse_concept_graph(line, line_number), &warnings));
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
          } else {
            UnifiedGraph g = deserialize_graph(line, line_number);
            unified.push_back(from == "ucca" ? from_ucca(g) : std::move(g));
          }
        } catch (const DataError& e) {
          std::cerr << "warning: " << e.what() << "\n";
          ++failures;
          if (!lenient) throw;
        }
      }
    } else if (from == "conllu" || from == "sdp") {
      auto reader = from == "conllu" ? read_conllu : read_sdp;
      for (const auto& g : read_blocks(in_path, reader, lenient, failures)) {
        try {
          unified.push_back(from_bilexical(g));
        } catch (const DataError& e) {
          std::cerr << "warning: " << e.what() << "\n";
          ++failures;
          if (!lenient) throw;
        }
      }
    } else {
      throw DataError("unknown source format '" + from + "'");
    }
    return failures;
  };
  try {
    ingest();
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (to == "native") {
      write_native_file(out_path, unified);
    } else if (to == "conllu" || to == "sdp") {
      std::vector<BilexicalGraph> out;
      for (const auto& g : unified) {
        try {
          out.push_back(to_bilexical(g));
        } catch (const DataError& e) {
          std::cerr << "warning: " << e.what() << "\n";
          ++failures;
        }
      }
      std::ofstream f(out_path);
      if (!f) throw DataError("cannot open " + out_path);
      if (to == "conllu")
        write_conllu(f, out);
      else
        write_sdp(f, out);
      if (failures > 0 && !lenient) return 2;
    } else {
      throw DataError("unknown target format '" + to + "'");
    }
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (failures > 0) std::cerr << "convert: " << failures << " record(s) skipped\n";
  return failures > 0 && !lenient ? 2 : 0;
}

ModelDims dims_from_config(const nlohmann::json& j) {
  std::string preset = j.value("preset", "multitask");
  ModelDims d;
  if (preset == "single") d = ModelDims::single_task();
  else if (preset == "multitask") d = ModelDims::multitask();
  else if (preset == "tiny") d = ModelDims::tiny(j.value("scale", 8));
  else throw DataError("unknown model preset '" + preset + "'");
  auto set = [&](const char* key, int& field) { field = j.value(key, field); };
  set("learned_word", d.learned_word);
  set("pretrained_word", d.pretrained_word);
  set("pos", d.pos);
  set("dep", d.dep);
  set("ne", d.ne);
  set("punct", d.punct);
  set("action", d.action);
  set("edge_label", d.edge_label);
  set("task_layers", d.task_layers);
  set("task_hidden", d.task_hidden);
  set("shared_layers", d.shared_layers);
  set("shared_hidden", d.shared_hidden);
  set("main_mlp_layers", d.main_mlp_layers);
  set("aux_mlp_layers", d.aux_mlp_layers);
  set("mlp_hidden", d.mlp_hidden);
  return d;
}

int run_train(const std::string& config_path, std::uint64_t seed_override, bool have_seed) {
  std::ifstream in(config_path);
  if (!in) throw DataError("cannot open training config " + config_path);
  nlohmann::json j = nlohmann::json::parse(in);

  std::uint64_t seed = have_seed ? seed_override : j.value("seed", default_seed());
  std::string main_name = j.at("main_task").get<std::string>();

  std::vector<ModelTask> model_tasks;
  std::vector<TaskCorpus> corpora;
  for (const nlohmann::json& jt : j.at("tasks")) {
    ModelTask mt;
    mt.config = TaskConfig::load(jt.at("config").get<std::string>());
    mt.features = jt.contains("features")
                      ? FeatureConfig::load(jt.at("features").get<std::string>())
                      : FeatureConfig::full();
    mt.is_main = mt.config.name == main_name;
    TaskCorpus corpus;
    corpus.task = mt.config.name;
    corpus.train = read_native_file(jt.at("train").get<std::string>());
    if (jt.contains("dev")) corpus.dev = read_native_file(jt.at("dev").get<std::string>());
    model_tasks.push_back(std::move(mt));
    corpora.push_back(std::move(corpus));
  }

  DropoutConfig dropout;
  if (j.contains("dropout")) {
    const nlohmann::json& jd = j["dropout"];
    dropout.mlp_p = jd.value("mlp_p", dropout.mlp_p);
    dropout.recurrent_p = jd.value("recurrent_p", dropout.recurrent_p);
    dropout.word_alpha = jd.value("word_alpha", dropout.word_alpha);
    dropout.tag_alpha = jd.value("tag_alpha", dropout.tag_alpha);
    dropout.dep_alpha = jd.value("dep_alpha", dropout.dep_alpha);
    dropout.node_dropout_p = jd.value("node_dropout_p", dropout.node_dropout_p);
  }

  Model model(dims_from_config(j.value("model", nlohmann::json::object())), dropout,
              std::move(model_tasks), seed);
  for (const TaskCorpus& c : corpora) {
    for (const UnifiedGraph& g : c.train) model.observe_graph(g);
    for (const UnifiedGraph& g : c.dev) model.observe_graph(g);
  }
  if (j.contains("pretrained")) model.load_pretrained(j.at("pretrained").get<std::string>());
  model.freeze();

  TrainingSchedule schedule;
  if (j.contains("schedule")) {
    const nlohmann::json& js = j["schedule"];
    schedule.epochs_sgd = js.value("epochs_sgd", schedule.epochs_sgd);
    schedule.epochs_amsgrad = js.value("epochs_amsgrad", schedule.epochs_amsgrad);
    schedule.sgd_lr = js.value("sgd_lr", schedule.sgd_lr);
    schedule.ams_alpha = js.value("ams_alpha", schedule.ams_alpha);
    schedule.beta1 = js.value("beta1", schedule.beta1);
    schedule.beta2 = js.value("beta2", schedule.beta2);
    schedule.weight_decay = js.value("weight_decay", schedule.weight_decay);
    schedule.minibatch = js.value("minibatch", schedule.minibatch);
    schedule.aux_loss_weight = js.value("aux_loss_weight", schedule.aux_loss_weight);
  }

  Rng rng(seed);
  TrainResult result = train_model(model, corpora, schedule, rng, &std::cerr);
  std::cerr << "best epoch " << result.best_epoch << " dev avg F1 " << result.best_f1 << "\n";
  if (j.contains("checkpoint")) {
    model.save(j.at("checkpoint").get<std::string>());
    std::cerr << "checkpoint written to " << j.at("checkpoint").get<std::string>() << "\n";
  }
  return 0;
}

int run_parse(const std::string& model_path, const std::string& task, const std::string& in_path,
              const std::string& out_path, int jobs) {
  Model model = Model::load_file(model_path);
  std::vector<UnifiedGraph> inputs = read_native_file(in_path);
  std::vector<UnifiedGraph> outputs(inputs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> truncated{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      ParseResult r = greedy_parse(model, inputs[i].tokens, task, inputs[i].id);
      if (r.truncated) ++truncated;
      outputs[i] = std::move(r.graph);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  write_native_file(out_path, outputs);
  if (truncated > 0)
    std::cerr << "warning: " << truncated << " sentence(s) hit the step bound\n";
  return 0;
}

int run_evaluate(const std::string& pred_path, const std::string& gold_path, bool unlabeled,
                 bool as_json) {
  Scores s = corpus_score(read_native_file(pred_path), read_native_file(gold_path), !unlabeled);
  if (as_json)
    std::cout << scores_to_json(s) << "\n";
  else
    std::cout << scores_to_table(s);
  return 0;
}

TaskConfig synthesized_task(const std::vector<UnifiedGraph>& corpus) {
  TaskConfig t;
  t.name = "generic";
  t.labeled = true;
  std::set<std::string> labels;
  for (const UnifiedGraph& g : corpus)
    for (const Edge& e : g.edges()) labels.insert(e.label);
  t.labels.assign(labels.begin(), labels.end());
  return t;
}

int run_oracle_check(const std::string& in_path, const std::string& task_config, bool as_json) {
  std::vector<UnifiedGraph> corpus = read_native_file(in_path);
  TaskConfig task =
      task_config.empty() ? synthesized_task(corpus) : TaskConfig::load(task_config);
  long ok = 0;
  std::vector<std::string> failures;
  for (const UnifiedGraph& gold : corpus) {
    try {
      OracleParse parsed = oracle_parse(gold, task);
      Scores s = score(parsed.graph, gold, task.labeled);
      if (s.primary.f1 == 1.0 && s.remote.f1 == 1.0) {
        ++ok;
      } else {
        failures.push_back(gold.id + ": F1 " + std::to_string(s.primary.f1) + "/" +
                           std::to_string(s.remote.f1));
      }
    } catch (const std::exception& e) {
      failures.push_back(gold.id + ": " + e.what());
    }
  }
  double rate = corpus.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(corpus.size());
  if (as_json) {
    nlohmann::json j{{"graphs", corpus.size()}, {"reconstructed", ok},
                     {"rate", rate},            {"failures", failures}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout.setf(std::ios::fixed);
    std::cout.precision(1);
    std::cout << "reconstruction F1 100% on " << ok << "/" << corpus.size() << " graphs ("
              << 100.0 * rate << ")\n";
    for (const std::string& f : failures) std::cout << "  FAIL " << f << "\n";
  }
  return failures.empty() ? 0 : 2;
}

int run_stats(const std::string& a_path, const std::string& b_path, bool l1, bool overlap,
              bool as_json, bool lowercase) {
  std::vector<UnifiedGraph> a = read_native_file(a_path);
  std::vector<UnifiedGraph> b = read_native_file(b_path);
  if (l1) {
    std::vector<std::vector<Token>> ta, tb;
    for (const auto& g : a) ta.push_back(g.tokens);
    for (const auto& g : b) tb.push_back(g.tokens);
    double d = l1_distance(ta, tb, lowercase);
    if (as_json)
      std::cout << nlohmann::json{{"l1", d}}.dump() << "\n";
    else
      std::cout << d << "\n";
    return 0;
  }
  if (overlap) {
    Scores s = scheme_overlap(a, b);
    if (as_json)
      std::cout << scores_to_json(s) << "\n";
    else
      std::cout << scores_to_table(s);
    return 0;
  }
  std::cerr << "stats: pass --l1 or --overlap\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transition-based DAG parsing toolkit"};
  app.require_subcommand(1);

  std::string from, to, in_path, out_path;
  bool lenient = false;
  CLI::App* convert = app.add_subcommand("convert", "convert between graph formats");
  convert->add_option("--from", from, "source format: conllu|sdp|concept-json|native|ucca")
      ->required();
  convert->add_option("--to", to, "target format: native|conllu|sdp")->required();
  convert->add_option("--in", in_path, "input file")->required();
  convert->add_option("--out", out_path, "output file")->required();
  convert->add_flag("--lenient", lenient, "skip bad records instead of failing");

  std::string train_config;
  std::uint64_t seed = 0;
  CLI::App* train = app.add_subcommand("train", "train a model");
  train->add_option("--config", train_config, "training config (JSON)")->required();
  CLI::Option* seed_opt = train->add_option("--seed", seed, "random seed (overrides config)");

  std::string model_path, task_name;
  int jobs = 1;
  CLI::App* parse = app.add_subcommand("parse", "parse token sequences greedily");
  parse->add_option("--model", model_path, "model checkpoint")->required();
  parse->add_option("--task", task_name, "task name")->required();
  parse->add_option("--in", in_path, "input corpus (native JSON lines)")->required();
  parse->add_option("--out", out_path, "output corpus")->required();
  parse->add_option("--jobs", jobs, "parallel workers");

  std::string pred_path, gold_path;
  bool unlabeled = false, as_json = false;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score predictions against gold");
  evaluate->add_option("--pred", pred_path)->required();
  evaluate->add_option("--gold", gold_path)->required();
  evaluate->add_flag("--unlabeled", unlabeled, "ignore edge labels");
  evaluate->add_flag("--json", as_json, "machine-readable output");

  std::string oc_task;
  CLI::App* oracle_check = app.add_subcommand("oracle-check", "verify oracle reconstruction");
  oracle_check->add_option("--in", in_path, "corpus (native JSON lines)")->required();
  oracle_check->add_option("--task", oc_task, "task config (default: synthesized)");
  oracle_check->add_flag("--json", as_json);

  std::string a_path, b_path;
  bool do_l1 = false, do_overlap = false, lowercase = false;
  CLI::App* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("--a", a_path)->required();
  stats->add_option("--b", b_path)->required();
  stats->add_flag("--l1", do_l1, "L1 distance between word distributions");
  stats->add_flag("--overlap", do_overlap, "unlabeled F1 between corpora");
  stats->add_flag("--lowercase", lowercase, "lowercase words for --l1");
  stats->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? 0 : 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  try {
    if (convert->parsed()) return run_convert(from, to, in_path, out_path, lenient);
    if (train->parsed()) return run_train(train_config, seed, seed_opt->count() > 0);
    if (parse->parsed()) return run_parse(model_path, task_name, in_path, out_path, jobs);
    if (evaluate->parsed()) return run_evaluate(pred_path, gold_path, unlabeled, as_json);
    if (oracle_check->parsed()) return run_oracle_check(in_path, oc_task, as_json);
    if (stats->parsed()) return run_stats(a_path, b_path, do_l1, do_overlap, as_json, lowercase);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
