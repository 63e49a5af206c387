#pragma once

// Project file tying resource, feature, group and corpus paths together.
//
//   (project
//     (lexicon "lexicon.sexp") (kb "kb.sexp") (subcat "subcat.sexp")
//     (features "features.sexp") (groups "groups.sexp")
//     (corpus "corpus") (model "model.sexp")
//     (max-steps 0) (detect-repeat TRUE))
//
// Relative paths resolve against the project file's directory.

#include <filesystem>
#include <string>
#include <vector>

#include "frameparse/engine.hpp"

namespace frameparse {

struct Project {
  std::filesystem::path root;
  std::filesystem::path lexicon, kb, subcat, features, groups, corpus, model;
  Limits limits;

  // Throws Error(ConfigError) for missing keys or files (the model may be absent).
  static Project load(const std::filesystem::path& file);

  ResourceBundle load_bundle() const;
  FeatureSet load_features() const;
  std::vector<GroupSpec> load_groups() const;
  // *.log files in name order.
  std::vector<std::filesystem::path> corpus_files() const;
  std::vector<ActionLog> load_corpus() const;
};

}  // namespace frameparse
