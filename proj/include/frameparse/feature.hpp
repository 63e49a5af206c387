#pragma once

// Feature language over parse states.
//
//   (SYNT OF OBJ OF -1 AT S-SYNT-ELEM)   general class of the object of the stack top
//   (SYNT OF (ALT S-ADV) OF 1)           adverbial alternative of the input front
//   (TENSE OF -1) (LEX OF 2) ...         selectors SYNT SEM LEX SURF TENSE NUMBER PERSON
//   (EXISTS OBJ OF -1)                   TRUE/FALSE; UNAVAILABLE if -1 itself is missing
//   (AGREEMENT -2 -1)                    subject-verb agreement of two frames
//   (SEMROLE -1 -2)                      role of -1 with respect to -2 by subcat matching

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "frameparse/action.hpp"
#include "frameparse/frame.hpp"
#include "frameparse/resources.hpp"

namespace frameparse {

using FeatureValue = std::string;

inline constexpr std::string_view kTrue = "TRUE";
inline constexpr std::string_view kFalse = "FALSE";
inline constexpr std::string_view kUnavailable = "UNAVAILABLE";

enum class Selector { Synt, Sem, Lex, Surf, Tense, Number, Person };

namespace feature {

struct Select {
  Selector selector = Selector::Synt;
  TreePath path;
  std::optional<Concept> alt;
  std::optional<Concept> level;
  friend bool operator==(const Select&, const Select&) = default;
};
struct Exists {
  TreePath path;
  friend bool operator==(const Exists&, const Exists&) = default;
};
struct Agreement {
  int a = -2;
  int b = -1;
  friend bool operator==(const Agreement&, const Agreement&) = default;
};
struct SemRole {
  int arg = -1;
  int head = -2;
  friend bool operator==(const SemRole&, const SemRole&) = default;
};

}  // namespace feature

using FeatureDef = std::variant<feature::Select, feature::Exists, feature::Agreement, feature::SemRole>;

// Throws Error(MalformedFeature).
FeatureDef parse_feature(std::string_view text);
std::string to_text(const FeatureDef& def);

// Total: every failure yields UNAVAILABLE.
FeatureValue eval_feature(const ParseState& state, const FeatureDef& def, const ResourceBundle& bundle);

class FeatureSet {
 public:
  FeatureSet() = default;
  // Throws Error(MalformedFeature) on duplicates.
  explicit FeatureSet(std::vector<FeatureDef> defs);

  // One feature per line; `;` comments.
  static FeatureSet parse(std::string_view text);
  static FeatureSet load(const std::filesystem::path& path);

  std::size_t size() const { return defs_.size(); }
  bool empty() const { return defs_.empty(); }
  const FeatureDef& operator[](std::size_t i) const { return defs_[i]; }
  const std::vector<std::string>& texts() const { return texts_; }
  const std::vector<FeatureDef>& defs() const { return defs_; }

 private:
  std::vector<FeatureDef> defs_;
  std::vector<std::string> texts_;
};

std::vector<FeatureValue> eval_vector(const ParseState& state, const FeatureSet& features,
                                      const ResourceBundle& bundle);

struct ParseExample {
  std::vector<FeatureValue> values;
  std::string action;  // canonical text
  std::size_t sentence = 0;
  std::size_t step = 0;
};

// One example per logged action, vectors taken from the state before it.
std::vector<ParseExample> extract_examples(const std::vector<ActionLog>& logs, const FeatureSet& features,
                                           const ResourceBundle& bundle);

// Index pairs (i < j) with identical vectors and different actions; at most
// one pair per distinct (vector, action) clash.
std::vector<std::pair<std::size_t, std::size_t>> find_conflicts(const std::vector<ParseExample>& examples);

// Tab-separated: header of feature texts plus ACTION, one row per example.
std::string format_examples(const FeatureSet& features, const std::vector<ParseExample>& examples);
std::vector<ParseExample> parse_examples(std::string_view text, std::size_t feature_count);

}  // namespace frameparse
