#pragma once

// Frames, word units, parse states and tree paths.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace frameparse {

// Uppercase symbol naming a syntactic (S-), semantic (I-/C-) or delimiter (D-)
// category.
class Concept {
 public:
  // Throws Error(InvalidSymbol) when `name` is not a valid concept symbol.
  explicit Concept(std::string name);

  static bool valid(std::string_view name);

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Concept&, const Concept&) = default;
  friend auto operator<=>(const Concept& a, const Concept& b) { return a.name_ <=> b.name_; }

 private:
  std::string name_;
};

// Role symbols (PRED, OBJ, AGENT, ...) share the concept alphabet.
bool valid_role(std::string_view role);

using RoleList = std::vector<std::string>;

enum class Number { Sing, Plur };

struct Forms {
  std::optional<int> person;  // 1, 2 or 3
  std::optional<Number> number;
  std::optional<std::string> tense;  // e.g. "past_tense"
  std::set<std::string> extra;

  bool empty() const { return !person && !number && !tense && extra.empty(); }

  // Surface tokens in fixed order: person, number, tense, extras.
  std::vector<std::string> tokens() const;
  // Inverse of tokens(); unrecognized tokens land in `extra`.
  static Forms from_tokens(const std::vector<std::string>& tokens);

  friend bool operator==(const Forms&, const Forms&) = default;
};

std::string_view to_string(Number n);

// Half-open token interval.
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start; }
  bool contains(const Span& o) const { return start <= o.start && o.end <= end; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Subframe;

struct Frame {
  std::string surface;
  std::string lex;
  Concept synt{"S-NOUN"};
  std::optional<Concept> sem;
  Forms forms;
  std::vector<Subframe> subs;
  std::optional<Span> span;  // absent for empty categories
  std::map<std::string, std::string> extras;

  bool is_leaf() const { return subs.empty(); }
  bool has_role(std::string_view role) const;
  // First subframe whose role list contains `role`.
  const Frame* child_with_role(std::string_view role) const;
  Frame* child_with_role(std::string_view role);
};

struct Subframe {
  RoleList roles;
  Frame child;
};

bool operator==(const Frame& a, const Frame& b);
bool operator==(const Subframe& a, const Subframe& b);

std::size_t hash_value(const Frame& f);

// Join token surfaces: no space before closing punctuation, none after an
// opening parenthesis.
std::string join_surface(const std::vector<std::string>& parts);

// Recomputes surface and span of a non-leaf frame from its children.
void refresh_derived(Frame& frame);

// Returns a description of the first structural invariant violation, if any.
std::optional<std::string> check_frame(const Frame& frame);

struct WordUnit {
  std::string surface;
  Span span;
  std::vector<Frame> alternatives;  // lexicon order, never empty

  friend bool operator==(const WordUnit&, const WordUnit&) = default;
};

using InputItem = std::variant<WordUnit, Frame>;

// Default view of an input item: the frame itself or the first alternative.
const Frame& default_frame(const InputItem& item);
std::optional<Span> item_span(const InputItem& item);

struct ParseState {
  std::vector<Frame> stack;     // top at the back
  std::vector<InputItem> input; // front at index 0
  std::vector<std::string> tokens;
  bool finished = false;

  std::size_t token_count() const { return tokens.size(); }
};

// Structural identity for loop detection: stack and input only.
bool same_configuration(const ParseState& a, const ParseState& b);
std::size_t configuration_hash(const ParseState& s);

struct TreePath {
  int anchor = -1;                 // -k stack, +k input; never 0
  std::vector<std::string> steps;  // roles, outermost first

  friend bool operator==(const TreePath&, const TreePath&) = default;
};

// "OBJ OF -1" style text; steps appear innermost first.
std::string to_text(const TreePath& path);

// Item at a signed state position, or nullptr.
const Frame* stack_at(const ParseState& state, int anchor);
const InputItem* input_at(const ParseState& state, int anchor);
const Frame* anchor_frame(const ParseState& state, int anchor);

// Descends `steps` from `root`; nullptr on any dangling step.
const Frame* descend(const Frame* root, const std::vector<std::string>& steps);

// nullptr means UNAVAILABLE. Never throws.
const Frame* resolve_path(const ParseState& state, const TreePath& path);

// Parses "OBJ OF -1" token sequences. Returns nullopt on malformed input.
std::optional<TreePath> parse_path_tokens(const std::vector<std::string>& tokens);

}  // namespace frameparse
