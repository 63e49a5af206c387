// frameparse: batch front end for replaying, training, parsing, evaluating and
// serving a project.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "frameparse/action.hpp"
#include "frameparse/engine.hpp"
#include "frameparse/error.hpp"
#include "frameparse/evaluator.hpp"
#include "frameparse/feature.hpp"
#include "frameparse/learner.hpp"
#include "frameparse/project.hpp"
#include "frameparse/service.hpp"
#include "frameparse/tree_text.hpp"

namespace fs = std::filesystem;
using namespace frameparse;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "7", "007" and "007.log" all name corpus/007.log; anything else is a path.
fs::path resolve_log(const Project& p, const std::string& id) {
  fs::path direct(id);
  if (fs::exists(direct) && fs::is_regular_file(direct)) return direct;
  std::string stem = id;
  if (stem.size() > 4 && stem.ends_with(".log")) stem.resize(stem.size() - 4);
  if (!stem.empty() && std::all_of(stem.begin(), stem.end(), ::isdigit)) {
    char name[32];
    std::snprintf(name, sizeof name, "%03d.log", std::stoi(stem));
    fs::path candidate = p.corpus / name;
    if (fs::exists(candidate)) return candidate;
  }
  throw UsageError("no log named " + id);
}

std::vector<fs::path> selected_logs(const Project& p, const std::vector<std::string>& ids) {
  if (ids.empty()) return p.corpus_files();
  std::vector<fs::path> out;
  for (const auto& id : ids) out.push_back(resolve_log(p, id));
  return out;
}

std::vector<ActionLog> load_logs(const std::vector<fs::path>& paths) {
  std::vector<ActionLog> out;
  for (const auto& f : paths) {
    try {
      out.push_back(load_log(f));
    } catch (const Error& e) {
      throw Error(e.code(), f.filename().string() + ": " + e.detail(), e.line());
    }
  }
  return out;
}

std::string first_difference(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  for (int line = 1;; ++line) {
    bool ga = static_cast<bool>(std::getline(sa, la));
    bool gb = static_cast<bool>(std::getline(sb, lb));
    if (!ga && !gb) return {};
    if (!ga || !gb || la != lb)
      return "line " + std::to_string(line) + ":\n  replayed: " + (ga ? la : "<end>") + "\n  golden:   " +
             (gb ? lb : "<end>");
  }
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

int cmd_replay(const Project& p, const std::vector<std::string>& ids, bool bless) {
  auto bundle = p.load_bundle();
  int status = kOk;
  for (const auto& path : selected_logs(p, ids)) {
    std::string name = path.filename().string();
    ActionLog log;
    try {
      log = load_log(path);
    } catch (const Error& e) {
      std::cout << name << ": " << to_string(e.code()) << " " << e.detail();
      if (e.line()) std::cout << " (line " << *e.line() << ")";
      std::cout << "\n";
      status = kFailed;
      continue;
    }
    try {
      auto result = replay(log, bundle);
      std::string replayed = render_tree(result.tree);
      if (bless) {
        log.gold_tree = result.tree;
        write_file(path, format_log(log));
        std::cout << name << ": blessed\n";
        continue;
      }
      if (!log.gold_tree) {
        std::cout << name << ": no golden tree\n";
        status = kFailed;
        continue;
      }
      auto diff = first_difference(replayed, render_tree(*log.gold_tree));
      if (diff.empty()) {
        std::cout << name << ": OK\n";
      } else {
        std::cout << name << ": MISMATCH at " << diff << "\n";
        status = kFailed;
      }
    } catch (const Error& e) {
      std::cout << name << ": " << to_string(e.code());
      if (e.step()) {
        std::cout << " at step " << *e.step() + 1;
        if (*e.step() < log.actions.size()) std::cout << " " << log.actions[*e.step()];
      }
      std::cout << ": " << e.detail() << "\n";
      status = kFailed;
    }
  }
  return status;
}

int cmd_extract(const Project& p, const std::vector<std::string>& ids, const std::string& out) {
  auto bundle = p.load_bundle();
  auto features = p.load_features();
  auto logs = load_logs(selected_logs(p, ids));
  auto examples = extract_examples(logs, features, bundle);
  std::string tsv = format_examples(features, examples);
  if (out.empty())
    std::cout << tsv;
  else
    write_file(out, tsv);
  auto conflicts = find_conflicts(examples);
  for (const auto& [a, b] : conflicts)
    std::cerr << "conflict: sentence " << examples[a].sentence + 1 << " step " << examples[a].step + 1 << " "
              << examples[a].action << " vs sentence " << examples[b].sentence + 1 << " step "
              << examples[b].step + 1 << " " << examples[b].action << "\n";
  std::cerr << examples.size() << " examples, " << conflicts.size() << " conflicts\n";
  return conflicts.empty() ? kOk : kFailed;
}

int cmd_train(const Project& p, Variant variant, const std::vector<std::string>& ids, const std::string& out) {
  auto bundle = p.load_bundle();
  auto features = p.load_features();
  auto logs = load_logs(selected_logs(p, ids));
  if (logs.empty()) throw UsageError("no logs to train on");
  auto examples = extract_examples(logs, features, bundle);
  std::vector<std::string> warnings;
  Model model = train_model(variant, features, examples, p.load_groups(), &warnings);
  fs::path target = out.empty() ? p.model : fs::path(out);
  write_file(target, save_model(model));
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  const auto& s = model.stats;
  std::printf("variant %s: %zu sentences, %zu examples, %zu nodes, depth %zu, training accuracy %.4f\n",
              std::string(to_string(variant)).c_str(), logs.size(), s.example_count, s.node_count, s.depth,
              s.training_accuracy);
  for (const auto& [a, b] : s.conflicts)
    std::printf("conflict: sentence %zu step %zu %s vs sentence %zu step %zu %s\n", examples[a].sentence + 1,
                examples[a].step + 1, examples[a].action.c_str(), examples[b].sentence + 1, examples[b].step + 1,
                examples[b].action.c_str());
  std::printf("model written to %s\n", target.string().c_str());
  return s.conflicts.empty() ? kOk : kFailed;
}

int cmd_parse(const Project& p, const std::string& model_path, const std::vector<std::string>& words,
              bool show_actions) {
  auto bundle = p.load_bundle();
  auto features = p.load_features();
  Model model = load_model_file(model_path.empty() ? p.model : fs::path(model_path));
  if (model.features != features.texts()) throw UsageError("model was trained on a different feature set");
  std::string sentence;
  for (const auto& w : words) sentence += (sentence.empty() ? "" : " ") + w;
  auto outcome = parse(sentence, model.structure, features, bundle, p.limits);
  if (show_actions)
    for (const auto& a : outcome.actions) std::cout << a << "\n";
  if (outcome.status == ParseStatus::Complete) {
    std::cout << render_tree(*outcome.tree);
    return kOk;
  }
  std::cout << to_string(outcome.status) << " after " << outcome.steps << " steps: " << outcome.message << "\n";
  if (!outcome.actions.empty()) std::cout << "last action: " << outcome.actions.back() << "\n";
  return kFailed;
}

int cmd_eval(const Project& p, Variant variant, std::size_t k, const std::vector<std::size_t>& sizes,
             const std::string& out_dir, long long seed) {
  auto bundle = p.load_bundle();
  auto features = p.load_features();
  auto corpus = p.load_corpus();
  CVConfig cfg;
  cfg.k = k;
  cfg.train_sizes = sizes;
  cfg.limits = p.limits;
  cfg.seed = seed;
  auto result = cross_validate(corpus, cfg, features, bundle, variant, p.load_groups());
  std::string table = format_report_table(result);
  std::cout << table;
  if (!out_dir.empty()) {
    std::string base = "report_" + std::string(to_string(variant));
    write_file(fs::path(out_dir) / (base + ".txt"), table);
    write_file(fs::path(out_dir) / (base + ".tsv"), format_report_tsv(result));
  }
  return kOk;
}

int cmd_serve(const Project& p, const std::string& host, int port, const std::string& model_path) {
  std::optional<Model> model;
  fs::path mp = model_path.empty() ? p.model : fs::path(model_path);
  if (fs::exists(mp)) model = load_model_file(mp);
  TrainingService service(p.load_bundle(), p.load_features(), p.load_groups(), p.corpus, std::move(model));
  HttpFrontend http(service);
  int bound = http.bind(host, port);
  if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  std::cout << "listening on http://" << host << ":" << bound << "\n" << std::flush;
  return http.listen() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frameparse: frame-based deterministic parser workbench"};
  app.require_subcommand(1);
  std::string project_file = "project.sexp";
  long long seed = 0;
  std::string variant_text = "hybrid";
  app.add_option("--project", project_file, "project file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "recorded in reports; no step is stochastic");
  app.add_option("--variant", variant_text, "tree|list|hier|hybrid")
      ->check(CLI::IsMember({"tree", "list", "hier", "hybrid"}, CLI::ignore_case));

  std::vector<std::string> ids;
  bool bless = false;
  auto* replay_cmd = app.add_subcommand("replay", "replay logs and compare against their golden trees");
  replay_cmd->add_option("ids", ids, "log ids or paths (default: whole corpus)");
  replay_cmd->add_flag("--bless", bless, "write the replayed tree as the golden tree");

  std::string out;
  auto* extract_cmd = app.add_subcommand("extract", "write feature vectors for every logged step");
  extract_cmd->add_option("ids", ids, "log ids (default: whole corpus)");
  extract_cmd->add_option("-o,--out", out, "output file (default: stdout)");

  auto* train_cmd = app.add_subcommand("train", "train a decision structure and save the model");
  train_cmd->add_option("ids", ids, "log ids (default: whole corpus)");
  train_cmd->add_option("-o,--out", out, "model file (default: the project's model)");

  std::vector<std::string> words;
  std::string model_path;
  bool show_actions = false;
  auto* parse_cmd = app.add_subcommand("parse", "parse a sentence with a trained model");
  parse_cmd->add_option("sentence", words, "sentence text")->required();
  parse_cmd->add_option("-m,--model", model_path, "model file (default: the project's model)");
  parse_cmd->add_flag("--actions", show_actions, "print the chosen actions before the tree");

  std::size_t k = 5;
  std::vector<std::size_t> sizes{4, 8, 16};
  std::string out_dir;
  auto* eval_cmd = app.add_subcommand("eval", "k-fold cross-validation report");
  eval_cmd->add_option("-k,--folds", k, "number of folds")->check(CLI::Range(2, 1000));
  eval_cmd->add_option("--sizes", sizes, "training sentences per series")->delimiter(',');
  eval_cmd->add_option("-o,--out-dir", out_dir, "directory for report_<variant>.txt/.tsv");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "run the training service");
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("-m,--model", model_path, "model file (default: the project's model)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Project p = Project::load(project_file);
    Variant variant = parse_variant(variant_text);
    if (*replay_cmd) return cmd_replay(p, ids, bless);
    if (*extract_cmd) return cmd_extract(p, ids, out);
    if (*train_cmd) return cmd_train(p, variant, ids, out);
    if (*parse_cmd) return cmd_parse(p, model_path, words, show_actions);
    if (*eval_cmd) return cmd_eval(p, variant, k, sizes, out_dir, seed);
    if (*serve_cmd) return cmd_serve(p, host, port, model_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.detail();
    if (e.line()) std::cerr << " (line " << *e.line() << ")";
    std::cerr << "\n";
    return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::Io ? kUsage : kFailed;
  }
  return kUsage;
}
