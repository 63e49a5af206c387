#include "frameparse/action.hpp"

#include <algorithm>
#include <sstream>

#include "frameparse/error.hpp"
#include "frameparse/sexpr.hpp"
#include "frameparse/tree_text.hpp"

namespace frameparse {

namespace {

using sexpr::Node;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedAction, what); }

// Category arguments drop the S- prefix in text: "VP" means S-VP.
Concept category_from_text(const Node& n) {
  if (!n.is_symbol()) malformed("expected category symbol");
  std::string name = sexpr::upper(n.text);
  if (!name.starts_with("S-")) name = "S-" + name;
  if (!Concept::valid(name)) malformed("bad category " + n.text);
  return Concept(name);
}

std::string category_to_text(const Concept& c) {
  const auto& name = c.name();
  if (name.starts_with("S-") && name.size() > 2 && !name.substr(2).starts_with("S-"))
    return name.substr(2);
  return name;
}

RoleList role_list(const Node& n) {
  RoleList roles;
  auto add = [&](const Node& r) {
    if (!r.is_symbol()) malformed("role must be a symbol");
    std::string role = sexpr::upper(r.text);
    if (!valid_role(role) || sexpr::as_integer(r)) malformed("bad role " + r.text);
    roles.push_back(std::move(role));
  };
  if (n.is_list()) {
    if (n.items.empty()) malformed("empty role list");
    for (const auto& r : n.items) add(r);
  } else {
    add(n);
  }
  return roles;
}

std::string role_list_text(const RoleList& roles) {
  if (roles.size() == 1) return roles.front();
  std::string out = "(";
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (i) out += ' ';
    out += roles[i];
  }
  return out + ")";
}

int position(const Node& n) {
  auto v = sexpr::as_integer(n);
  if (!v || *v == 0 || *v > 100000 || *v < -100000) malformed("expected non-zero position");
  return static_cast<int>(*v);
}

TreePath path_from(const std::vector<Node>& items, std::size_t begin, std::size_t end) {
  std::vector<std::string> toks;
  for (std::size_t i = begin; i < end; ++i) {
    if (!items[i].is_symbol()) malformed("path tokens must be symbols");
    toks.push_back(items[i].text);
  }
  auto path = parse_path_tokens(toks);
  if (!path) malformed("bad path");
  return *path;
}

// Index one past the anchor of a path starting at `begin`.
std::size_t path_end(const std::vector<Node>& items, std::size_t begin) {
  for (std::size_t i = begin; i < items.size(); ++i)
    if (sexpr::as_integer(items[i])) return i + 1;
  malformed("path without anchor");
}

std::string path_text(const TreePath& p) { return to_text(p); }

std::string normalize_mark_value(const std::string& slot, const Node& v) {
  if (!v.is_symbol()) malformed("mark value must be a symbol");
  if (slot == "PERSON") {
    if (v.text != "1" && v.text != "2" && v.text != "3") malformed("PERSON must be 1, 2 or 3");
    return v.text;
  }
  if (slot == "NUMBER") {
    auto up = sexpr::upper(v.text);
    if (up != "SING" && up != "PLUR") malformed("NUMBER must be SING or PLUR");
    return up;
  }
  if (slot == "SYNT" || slot == "SEM") {
    auto up = sexpr::upper(v.text);
    if (!Concept::valid(up)) malformed("bad concept " + v.text);
    return up;
  }
  return v.text;
}

[[noreturn]] void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// Location of a frame inside a mutable state.
struct Slot {
  Frame* root = nullptr;
  std::vector<Frame*> chain;  // root ... target
};

Frame* mutable_anchor(ParseState& s, int anchor) {
  if (anchor < 0) {
    auto k = static_cast<std::size_t>(-anchor);
    if (k > s.stack.size()) return nullptr;
    return &s.stack[s.stack.size() - k];
  }
  auto k = static_cast<std::size_t>(anchor);
  if (k == 0 || k > s.input.size()) return nullptr;
  auto& item = s.input[k - 1];
  if (auto* w = std::get_if<WordUnit>(&item)) {
    Frame committed = w->alternatives.front();
    item = std::move(committed);
  }
  return &std::get<Frame>(item);
}

std::optional<Slot> locate(ParseState& s, const TreePath& path) {
  Frame* f = mutable_anchor(s, path.anchor);
  if (!f) return std::nullopt;
  Slot slot{f, {f}};
  for (const auto& step : path.steps) {
    f = f->child_with_role(step);
    if (!f) return std::nullopt;
    slot.chain.push_back(f);
  }
  return slot;
}

void set_slot(Frame& f, const std::string& slot, const std::string& value) {
  if (slot == "PERSON")
    f.forms.person = value[0] - '0';
  else if (slot == "NUMBER")
    f.forms.number = value == "SING" ? Number::Sing : Number::Plur;
  else if (slot == "TENSE")
    f.forms.tense = value;
  else if (slot == "FORM")
    f.forms.extra.insert(value);
  else if (slot == "SYNT")
    f.synt = Concept(value);
  else if (slot == "SEM")
    f.sem = Concept(value);
  else
    f.extras[slot] = value;
}

std::string coindex_of(const Frame& f) {
  if (f.span) return std::to_string(f.span->start) + "-" + std::to_string(f.span->end);
  auto it = f.extras.find("COINDEX");
  return it == f.extras.end() ? std::string("?") : it->second;
}

}  // namespace

ParseAction parse_action(std::string_view text) {
  Node n;
  try {
    n = sexpr::parse_one(text);
  } catch (const Error& e) {
    malformed(e.detail());
  }
  if (!n.is_list() || n.items.empty() || !n.items[0].is_symbol()) malformed("expected (KEYWORD ...)");
  const auto& it = n.items;
  const Node& head = it[0];

  if (head.is_keyword("S")) {
    if (it.size() == 1) return action::Shift{};
    if (it.size() == 2) return action::Shift{category_from_text(it[1])};
    malformed("shift takes at most one category");
  }
  if (head.is_keyword("S-BACK")) {
    if (it.size() != 1) malformed("S-BACK takes no arguments");
    return action::ShiftBack{};
  }
  if (head.is_keyword("R")) {
    if (it.size() < 5) malformed("reduce needs (R n TO CAT AS roles...)");
    auto count = sexpr::as_integer(it[1]);
    if (!count || *count < 1) malformed("reduce count must be >= 1");
    if (*count > 1000) malformed("reduce count too large");
    if (!it[2].is_keyword("TO") || !it[4].is_keyword("AS")) malformed("expected TO ... AS");
    action::Reduce r{static_cast<int>(*count), category_from_text(it[3]), {}};
    for (std::size_t i = 5; i < it.size(); ++i) r.roles.push_back(role_list(it[i]));
    if (static_cast<int>(r.roles.size()) != r.count)
      malformed("reduce of " + std::to_string(r.count) + " frames needs as many role lists");
    auto preds = std::count_if(r.roles.begin(), r.roles.end(), [](const RoleList& rl) {
      return std::find(rl.begin(), rl.end(), "PRED") != rl.end();
    });
    if (preds != 1) malformed("reduce needs exactly one PRED");
    return r;
  }
  if (head.is_keyword("A")) {
    if (it.size() < 6 || !it[2].is_keyword("INTO")) malformed("add-into needs (A src INTO path AS roles)");
    action::AddInto a;
    a.source = position(it[1]);
    std::size_t end = path_end(it, 3);
    a.dest = path_from(it, 3, end);
    if (end + 2 != it.size() || !it[end].is_keyword("AS")) malformed("add-into needs AS roles");
    a.roles = role_list(it[end + 1]);
    return a;
  }
  if (head.is_keyword("M")) {
    if (it.size() < 4) malformed("mark needs (M path SLOT VALUE)");
    std::size_t end = path_end(it, 1);
    action::Mark m;
    m.path = path_from(it, 1, end);
    if (end + 2 != it.size() || !it[end].is_symbol()) malformed("mark needs SLOT VALUE after the path");
    m.slot = sexpr::upper(it[end].text);
    if (!valid_role(m.slot)) malformed("bad slot " + it[end].text);
    m.value = normalize_mark_value(m.slot, it[end + 1]);
    return m;
  }
  if (head.is_keyword("E")) {
    if (it.size() < 3) malformed("empty category needs (E PRO|TRACE path)");
    action::IntroEmpty e;
    if (it[1].is_keyword("PRO"))
      e.kind = action::EmptyKind::Pro;
    else if (it[1].is_keyword("TRACE"))
      e.kind = action::EmptyKind::Trace;
    else
      malformed("empty category kind must be PRO or TRACE");
    e.coref = path_from(it, 2, it.size());
    return e;
  }
  if (head.is_keyword("DONE")) {
    if (it.size() != 1) malformed("DONE takes no arguments");
    return action::Done{};
  }
  malformed("unknown action keyword " + head.text);
}

std::string canonicalize(const ParseAction& a) {
  struct Printer {
    std::string operator()(const action::Shift& s) const {
      return s.pos ? "(S " + category_to_text(*s.pos) + ")" : "(S)";
    }
    std::string operator()(const action::ShiftBack&) const { return "(S-BACK)"; }
    std::string operator()(const action::Reduce& r) const {
      std::string out = "(R " + std::to_string(r.count) + " TO " + category_to_text(r.target) + " AS";
      for (const auto& rl : r.roles) out += " " + role_list_text(rl);
      return out + ")";
    }
    std::string operator()(const action::AddInto& a) const {
      return "(A " + std::to_string(a.source) + " INTO " + path_text(a.dest) + " AS " +
             role_list_text(a.roles) + ")";
    }
    std::string operator()(const action::Mark& m) const {
      return "(M " + path_text(m.path) + " " + m.slot + " " + m.value + ")";
    }
    std::string operator()(const action::IntroEmpty& e) const {
      return std::string("(E ") + (e.kind == action::EmptyKind::Pro ? "PRO " : "TRACE ") +
             path_text(e.coref) + ")";
    }
    std::string operator()(const action::Done&) const { return "(DONE)"; }
  };
  return std::visit(Printer{}, a);
}

std::string action_class(const ParseAction& a) {
  static constexpr const char* kNames[] = {"S", "S-BACK", "R", "A", "M", "E", "DONE"};
  return kNames[a.index()];
}

std::string action_class(std::string_view text) {
  auto start = text.find_first_not_of("( ");
  if (start == std::string_view::npos) return {};
  auto stop = text.find_first_of(" )", start);
  return sexpr::upper(text.substr(start, stop == std::string_view::npos ? std::string_view::npos : stop - start));
}

ParseState initial_state(std::string_view sentence, const Lexicon& lexicon) {
  ParseState s;
  s.tokens = segment(sentence);
  for (std::size_t i = 0; i < s.tokens.size(); ++i)
    s.input.emplace_back(analyze(s.tokens[i], static_cast<int>(i), lexicon));
  return s;
}

ParseState apply_action(const ParseState& state, const ParseAction& act) {
  if (state.finished) fail(ErrorCode::AlreadyDone, "parse already completed");
  ParseState s = state;

  struct Applier {
    ParseState& s;

    void operator()(const action::Shift& a) {
      if (s.input.empty()) fail(ErrorCode::InputExhausted, "shift on empty input");
      InputItem front = std::move(s.input.front());
      s.input.erase(s.input.begin());
      if (auto* w = std::get_if<WordUnit>(&front)) {
        const Frame* chosen = nullptr;
        if (!a.pos) {
          chosen = &w->alternatives.front();
        } else {
          for (const auto& alt : w->alternatives)
            if (alt.synt == *a.pos) {
              chosen = &alt;
              break;
            }
        }
        if (!chosen)
          fail(ErrorCode::NoSuchAlternative, "'" + w->surface + "' has no " + a.pos->name() + " reading");
        s.stack.push_back(*chosen);
      } else {
        auto& f = std::get<Frame>(front);
        if (a.pos && f.synt != *a.pos)
          fail(ErrorCode::NoSuchAlternative, "input frame is not " + a.pos->name());
        s.stack.push_back(std::move(f));
      }
    }

    void operator()(const action::ShiftBack&) {
      if (s.stack.empty()) fail(ErrorCode::StackUnderflow, "shift back on empty stack");
      s.input.insert(s.input.begin(), InputItem{std::move(s.stack.back())});
      s.stack.pop_back();
    }

    void operator()(const action::Reduce& r) {
      auto n = static_cast<std::size_t>(r.count);
      if (n > s.stack.size())
        fail(ErrorCode::StackUnderflow, "reduce of " + std::to_string(n) + " frames on a stack of " +
                                            std::to_string(s.stack.size()));
      Frame out;
      out.synt = r.target;
      const std::size_t base = s.stack.size() - n;
      for (std::size_t i = 0; i < n; ++i)
        out.subs.push_back(Subframe{r.roles[i], std::move(s.stack[base + i])});
      s.stack.resize(base);
      const Frame* head = out.child_with_role("PRED");
      out.lex = head->lex;
      out.sem = head->sem;
      out.forms = head->forms;
      refresh_derived(out);
      if (auto bad = check_frame(out)) fail(ErrorCode::NonContiguous, *bad);
      s.stack.push_back(std::move(out));
    }

    void operator()(const action::AddInto& a) {
      if (a.source == a.dest.anchor) fail(ErrorCode::PathUnresolved, "cannot add a frame into itself");
      Frame moving;
      if (a.source < 0) {
        const Frame* f = stack_at(s, a.source);
        if (!f) fail(ErrorCode::PathUnresolved, "no frame at " + std::to_string(a.source));
        moving = *f;
      } else {
        const InputItem* item = input_at(s, a.source);
        if (!item) fail(ErrorCode::PathUnresolved, "no input item at " + std::to_string(a.source));
        moving = default_frame(*item);
      }
      auto slot = locate(s, a.dest);
      if (!slot) fail(ErrorCode::PathUnresolved, "no frame at " + to_text(a.dest));
      Frame& target = *slot->chain.back();
      auto pos = target.subs.end();
      if (moving.span) {
        pos = std::find_if(target.subs.begin(), target.subs.end(), [&](const Subframe& sub) {
          return sub.child.span && sub.child.span->start > moving.span->start;
        });
      }
      target.subs.insert(pos, Subframe{a.roles, std::move(moving)});
      for (auto it = slot->chain.rbegin(); it != slot->chain.rend(); ++it) refresh_derived(**it);
      if (auto bad = check_frame(*slot->root)) fail(ErrorCode::NonContiguous, *bad);
      if (a.source < 0)
        s.stack.erase(s.stack.end() + a.source);
      else
        s.input.erase(s.input.begin() + (a.source - 1));
    }

    void operator()(const action::Mark& m) {
      // Marking an uncommitted word unit marks every alternative.
      if (m.path.anchor > 0 && m.path.steps.empty()) {
        auto k = static_cast<std::size_t>(m.path.anchor);
        if (k <= s.input.size()) {
          if (auto* w = std::get_if<WordUnit>(&s.input[k - 1])) {
            for (auto& alt : w->alternatives) set_slot(alt, m.slot, m.value);
            return;
          }
        }
      }
      auto slot = locate(s, m.path);
      if (!slot) fail(ErrorCode::PathUnresolved, "no frame at " + to_text(m.path));
      set_slot(*slot->chain.back(), m.slot, m.value);
    }

    void operator()(const action::IntroEmpty& e) {
      const Frame* target = resolve_path(s, e.coref);
      if (!target) fail(ErrorCode::PathUnresolved, "no frame at " + to_text(e.coref));
      Frame f;
      f.surface = e.kind == action::EmptyKind::Pro ? "PRO" : "TRACE";
      f.lex = f.surface;
      f.synt = Concept("S-NP");
      f.extras["COINDEX"] = coindex_of(*target);
      s.stack.push_back(std::move(f));
    }

    void operator()(const action::Done&) {
      if (!s.input.empty() || s.stack.size() != 1)
        fail(ErrorCode::PrematureDone, "DONE with " + std::to_string(s.stack.size()) + " stack frames and " +
                                           std::to_string(s.input.size()) + " input items");
      s.finished = true;
    }
  };

  std::visit(Applier{s}, act);
  return s;
}

ActionLog parse_log(std::string_view text) {
  ActionLog log;
  bool have_sentence = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    std::string_view body = line.substr(first);
    if (!have_sentence) {
      if (!body.starts_with("#SENTENCE "))
        throw Error(ErrorCode::MalformedLog, "log must start with #SENTENCE", line_no);
      log.sentence = std::string(body.substr(10));
      have_sentence = true;
      continue;
    }
    if (body.front() == ';') continue;
    if (body == "#TREE") {
      try {
        log.gold_tree = parse_tree_text(text.substr(pos));
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedLog, "bad #TREE section: " + e.detail(),
                    e.line() ? std::optional<std::size_t>(*e.line() + line_no) : std::nullopt);
      }
      return log;
    }
    try {
      log.actions.push_back(canonicalize(parse_action(body)));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedLog, e.what(), line_no);
    }
  }
  if (!have_sentence) throw Error(ErrorCode::MalformedLog, "empty log", 1);
  return log;
}

std::string format_log(const ActionLog& log) {
  std::string out = "#SENTENCE " + log.sentence + "\n";
  for (const auto& a : log.actions) out += a + "\n";
  if (log.gold_tree) out += "#TREE\n" + render_tree(*log.gold_tree);
  return out;
}

ActionLog load_log(const std::filesystem::path& path) { return parse_log(read_file(path)); }

ReplayResult replay(const ActionLog& log, const ResourceBundle& bundle) {
  ReplayResult result;
  ParseState state = initial_state(log.sentence, bundle.lexicon);
  result.states.reserve(log.actions.size());
  for (std::size_t i = 0; i < log.actions.size(); ++i) {
    try {
      ParseAction a = parse_action(log.actions[i]);
      result.states.push_back(state);
      state = apply_action(state, a);
    } catch (const Error& e) {
      throw e.with_step(i);
    }
  }
  if (!state.finished)
    throw Error(ErrorCode::IncompleteParse, "log ends without DONE").with_step(log.actions.size());
  result.tree = state.stack.front();
  result.final_state = std::move(state);
  return result;
}

}  // namespace frameparse
