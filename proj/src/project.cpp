#include "frameparse/project.hpp"

#include <algorithm>
#include <map>

#include "frameparse/error.hpp"
#include "frameparse/sexpr.hpp"

namespace frameparse {

namespace fs = std::filesystem;

Project Project::load(const fs::path& file) {
  std::vector<sexpr::Node> top;
  try {
    top = sexpr::parse_all(read_file(file));
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, file.string() + ": " + e.detail(), e.line());
  }
  if (top.size() != 1 || !top[0].is_list() || top[0].items.empty() || !top[0].items[0].is_keyword("project"))
    throw Error(ErrorCode::ConfigError, file.string() + ": expected a single (project ...) form");

  Project p;
  p.root = fs::absolute(file).parent_path();
  std::map<std::string, fs::path*> paths{{"LEXICON", &p.lexicon}, {"KB", &p.kb},         {"SUBCAT", &p.subcat},
                                         {"FEATURES", &p.features}, {"GROUPS", &p.groups}, {"CORPUS", &p.corpus},
                                         {"MODEL", &p.model}};
  for (std::size_t i = 1; i < top[0].items.size(); ++i) {
    const auto& n = top[0].items[i];
    if (!n.is_list() || n.items.size() != 2 || !n.items[0].is_symbol())
      throw Error(ErrorCode::ConfigError, "expected (key value)", n.line);
    std::string key = sexpr::upper(n.items[0].text);
    const auto& v = n.items[1];
    if (auto it = paths.find(key); it != paths.end()) {
      if (!v.is_atom()) throw Error(ErrorCode::ConfigError, key + " expects a path", n.line);
      *it->second = p.root / v.text;
    } else if (key == "MAX-STEPS") {
      auto steps = sexpr::as_integer(v);
      if (!steps || *steps < 0) throw Error(ErrorCode::ConfigError, "max-steps expects a count", n.line);
      p.limits.max_steps = static_cast<std::size_t>(*steps);
    } else if (key == "DETECT-REPEAT") {
      if (!v.is_keyword("TRUE") && !v.is_keyword("FALSE"))
        throw Error(ErrorCode::ConfigError, "detect-repeat expects TRUE or FALSE", n.line);
      p.limits.detect_state_repeat = v.is_keyword("TRUE");
    } else {
      throw Error(ErrorCode::ConfigError, "unknown project key " + key, n.line);
    }
  }
  for (const auto& [key, path] : paths) {
    if (path->empty()) throw Error(ErrorCode::ConfigError, "project file lacks (" + key + " ...)");
    if (key != "MODEL" && !fs::exists(*path)) throw Error(ErrorCode::ConfigError, "missing " + path->string());
  }
  return p;
}

ResourceBundle Project::load_bundle() const { return frameparse::load_bundle(lexicon, kb, subcat); }

FeatureSet Project::load_features() const { return FeatureSet::load(features); }

std::vector<GroupSpec> Project::load_groups() const { return parse_group_config(read_file(groups)); }

std::vector<fs::path> Project::corpus_files() const {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(corpus))
    if (entry.is_regular_file() && entry.path().extension() == ".log") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ActionLog> Project::load_corpus() const {
  std::vector<ActionLog> out;
  for (const auto& f : corpus_files()) out.push_back(load_log(f));
  return out;
}

}  // namespace frameparse
