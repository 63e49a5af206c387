#pragma once

// Parse actions: the atomic steps of the deterministic parser.
//
// Canonical text forms:
//   (S) (S NOUN)                          shift, optional part-of-speech choice
//   (S-BACK)                              stack top back onto the input
//   (R 2 TO VP AS PRED (OBJ PAT))         reduce; one role list per frame, bottom first
//   (A -1 INTO OBJ OF -2 AS MOD)          add a frame into an existing tree
//   (M OBJ OF -1 NUMBER PLUR)             mark a slot
//   (E PRO SUBJ OF -2)                    introduce an empty category
//   (DONE)

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "frameparse/frame.hpp"
#include "frameparse/resources.hpp"

namespace frameparse {

namespace action {

struct Shift {
  std::optional<Concept> pos;
  friend bool operator==(const Shift&, const Shift&) = default;
};
struct ShiftBack {
  friend bool operator==(const ShiftBack&, const ShiftBack&) = default;
};
struct Reduce {
  int count = 1;
  Concept target{"S-NP"};
  std::vector<RoleList> roles;  // bottom-to-top over the consumed frames
  friend bool operator==(const Reduce&, const Reduce&) = default;
};
struct AddInto {
  int source = -1;
  TreePath dest;
  RoleList roles;
  friend bool operator==(const AddInto&, const AddInto&) = default;
};
struct Mark {
  TreePath path;
  std::string slot;
  std::string value;
  friend bool operator==(const Mark&, const Mark&) = default;
};
enum class EmptyKind { Pro, Trace };
struct IntroEmpty {
  EmptyKind kind = EmptyKind::Pro;
  TreePath coref;
  friend bool operator==(const IntroEmpty&, const IntroEmpty&) = default;
};
struct Done {
  friend bool operator==(const Done&, const Done&) = default;
};

}  // namespace action

using ParseAction = std::variant<action::Shift, action::ShiftBack, action::Reduce,
                                 action::AddInto, action::Mark, action::IntroEmpty,
                                 action::Done>;

// Keywords are case-insensitive. Throws Error(MalformedAction).
ParseAction parse_action(std::string_view text);

std::string canonicalize(const ParseAction& action);

// Leading keyword of the canonical form: S, S-BACK, R, A, M, E or DONE.
std::string action_class(const ParseAction& action);
std::string action_class(std::string_view canonical_text);

ParseState initial_state(std::string_view sentence, const Lexicon& lexicon);

// Returns the successor state; `state` is untouched. Throws Error with
// StackUnderflow, InputExhausted, NoSuchAlternative, PathUnresolved,
// PrematureDone, AlreadyDone or NonContiguous.
ParseState apply_action(const ParseState& state, const ParseAction& action);

struct ActionLog {
  std::string sentence;
  std::vector<std::string> actions;  // canonical text
  std::optional<Frame> gold_tree;
};

// Log file: "#SENTENCE <text>", one action per line, "#TREE", tree text.
// Throws Error(MalformedLog) with a line number.
ActionLog parse_log(std::string_view text);
std::string format_log(const ActionLog& log);
ActionLog load_log(const std::filesystem::path& path);

struct ReplayResult {
  Frame tree;
  std::vector<ParseState> states;  // state before each action
  ParseState final_state;
};

// Errors carry the failing action index via Error::step(); a log that does
// not end in a completed parse raises IncompleteParse.
ReplayResult replay(const ActionLog& log, const ResourceBundle& bundle);

}  // namespace frameparse
