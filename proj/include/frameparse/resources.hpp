#pragma once

// Lexicon, is-a concept graph and verb subcategorization table.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "frameparse/frame.hpp"

namespace frameparse {

struct LexReading {
  Concept synt{"S-NOUN"};
  std::optional<Concept> sem;
  Forms forms;
  std::optional<std::string> lex_override;
};

struct LexEntry {
  std::string word;
  std::vector<LexReading> readings;  // file order
};

using Lexicon = std::map<std::string, LexEntry>;

// Directed acyclic is-a graph with a precomputed reflexive-transitive closure.
class ConceptGraph {
 public:
  ConceptGraph() = default;

  // Throws Error(UnknownConcept) for undeclared link endpoints and
  // Error(Cycle) when the links are not acyclic.
  ConceptGraph(const std::vector<Concept>& concepts,
               const std::vector<std::pair<Concept, Concept>>& links);

  bool contains(const Concept& c) const { return index_.count(c.name()) != 0; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t link_count() const;

  // True iff `ancestor` is reachable from `c` via zero or more links.
  // Throws Error(UnknownConcept).
  bool isa(const Concept& c, const Concept& ancestor) const;

  // The ancestor of `c` (possibly `c`) that is a direct child of `level`;
  // lexicographically smallest on ties. Throws Error(UnknownConcept).
  std::optional<Concept> generalize(const Concept& c, const Concept& level) const;

  std::vector<Concept> parents(const Concept& c) const;
  std::vector<Concept> children(const Concept& c) const;

 private:
  int id(const Concept& c) const;

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;  // sorted by name
  std::vector<std::vector<bool>> ancestors_;
};

struct RoleSlot {
  std::string synt_role;
  std::string sem_role;
  std::optional<Concept> sem_class;  // nullopt = ANY
};

using RolePattern = std::vector<RoleSlot>;

struct SubcatEntry {
  Concept verb_sem{"I-EV-UNKNOWN"};
  std::vector<RolePattern> patterns;
};

using SubcatTable = std::map<std::string, SubcatEntry>;

struct ResourceBundle {
  Lexicon lexicon;
  ConceptGraph kb;
  SubcatTable subcat;
};

// Loaders for the s-expression resource files. Throw Error(MalformedResource).
Lexicon parse_lexicon(std::string_view text);
ConceptGraph parse_kb(std::string_view text);
SubcatTable parse_subcat(std::string_view text);

// Cross-checks that lexicon and subcat concepts exist in the KB, including the
// unknown-word fallback concepts. Throws Error(UnknownConcept).
void validate_bundle(const ResourceBundle& bundle);

ResourceBundle load_bundle(const std::filesystem::path& lexicon,
                           const std::filesystem::path& kb,
                           const std::filesystem::path& subcat);

std::string read_file(const std::filesystem::path& path);

// Splits on whitespace and peels leading/trailing punctuation (.,;:!?()"')
// into separate tokens.
std::vector<std::string> segment(std::string_view text);

inline const Concept& unknown_word_synt() {
  static const Concept c{"S-NOUN"};
  return c;
}
inline const Concept& unknown_word_sem() {
  static const Concept c{"C-UNKNOWN"};
  return c;
}

// One alternative per lexicon reading; unknown tokens get a single noun
// reading flagged with extras UNKNOWN=TRUE. Lookup tries the exact token, then
// its lowercase form.
WordUnit analyze(const std::string& token, int index, const Lexicon& lexicon);

// Semantic role `arg` would fill for `verb`, or nullopt.
std::optional<std::string> subcat_match(const ResourceBundle& bundle, const Frame& verb,
                                        const Frame& arg);

}  // namespace frameparse
