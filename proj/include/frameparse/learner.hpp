#pragma once

// Decision structures proposing the next parse action: ID3 trees, decision
// lists, hierarchical (class first, then specific action) combinations of
// either, and the hybrid list of gated hierarchical trees.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "frameparse/feature.hpp"
#include "frameparse/sexpr.hpp"

namespace frameparse {

// Shannon entropy in bits. Throws Error(Empty) when every count is zero.
double entropy(const std::vector<std::size_t>& counts);

// Label entropy minus the weighted entropy of the value partition of `feature`.
double info_gain(const std::vector<ParseExample>& examples, std::size_t feature);

struct TreeBranch;

struct DecisionTree {
  // Leaf when `feature` is empty; internal nodes still carry their majority
  // action and counts.
  std::optional<std::size_t> feature;
  std::vector<TreeBranch> branches;  // sorted by value
  std::string default_value;         // branch followed for unseen values
  std::string action;
  std::size_t support = 0;
  std::map<std::string, std::size_t> distribution;

  bool is_leaf() const { return !feature.has_value(); }
};

struct TreeBranch {
  FeatureValue value;
  DecisionTree subtree;
};

struct Rule {
  std::vector<std::pair<std::size_t, FeatureValue>> tests;
  std::string action;
  std::size_t support = 0;
};

struct DecisionList {
  std::vector<Rule> rules;
  std::string default_action;
};

using BaseStructure = std::variant<DecisionTree, DecisionList>;

struct Hierarchical {
  BaseStructure classes;                        // over action classes
  std::map<std::string, BaseStructure> per_class;  // over full actions
};

// Sequence pattern over the items of a canonical action; `*` matches any run.
struct ActionPattern {
  sexpr::Node pattern;

  static ActionPattern parse(std::string_view text);
  bool matches(std::string_view canonical_action) const;
  std::string text() const;
};

struct GroupSpec {
  std::string name;
  std::vector<ActionPattern> patterns;

  bool matches(std::string_view canonical_action) const;
};

// `(group EMPTY (E *)) (group ADDINTO (A *)) (group MARK (M *)) (default)`.
// Throws Error(MalformedStructure).
std::vector<GroupSpec> parse_group_config(std::string_view text);

struct HybridGroup {
  GroupSpec spec;
  DecisionTree gate;  // TRUE / FALSE
  Hierarchical body;
};

struct Hybrid {
  std::vector<HybridGroup> groups;
  std::optional<Hierarchical> default_body;
  std::string fallback;  // when no gate fires and nothing reached the default
};

enum class Variant { Tree, List, Hier, Hybrid };

std::string_view to_string(Variant v);
// Throws Error(ConfigError).
Variant parse_variant(std::string_view text);

using Structure = std::variant<DecisionTree, DecisionList, Hierarchical, Hybrid>;

DecisionTree train_id3(const std::vector<ParseExample>& examples);
DecisionList train_dlist(const std::vector<ParseExample>& examples);
// Base learner chosen by `lists`.
Hierarchical train_hier(const std::vector<ParseExample>& examples, bool lists);
Hybrid train_hybrid(const std::vector<ParseExample>& examples, const std::vector<GroupSpec>& groups,
                    std::vector<std::string>* warnings = nullptr);

struct Decision {
  std::string stage;  // "tree", "class", "R", "gate EMPTY", "rule 3", ...
  std::optional<std::size_t> feature;
  FeatureValue value;     // value seen in the query vector
  FeatureValue taken;     // branch or test value followed
  bool used_default = false;
};

struct Classification {
  std::string action;
  std::vector<Decision> trace;
};

Classification classify(const Structure& s, const std::vector<FeatureValue>& values);
std::string classify_action(const Structure& s, const std::vector<FeatureValue>& values);

struct TrainStats {
  std::size_t example_count = 0;
  std::size_t node_count = 0;
  std::size_t depth = 0;
  double training_accuracy = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> conflicts;
};

TrainStats structure_stats(const Structure& s, const std::vector<ParseExample>& examples);

struct Model {
  Variant variant = Variant::Tree;
  std::vector<std::string> features;  // canonical feature texts
  Structure structure;
  TrainStats stats;
};

Model train_model(Variant variant, const FeatureSet& features, const std::vector<ParseExample>& examples,
                  const std::vector<GroupSpec>& groups, std::vector<std::string>* warnings = nullptr);

sexpr::Node structure_to_sexpr(const Structure& s);
Structure structure_from_sexpr(const sexpr::Node& n);

// Throws Error(MalformedStructure).
std::string save_model(const Model& m);
Model load_model(std::string_view text);
Model load_model_file(const std::filesystem::path& path);

}  // namespace frameparse
