#include "frameparse/feature.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "frameparse/error.hpp"
#include "frameparse/sexpr.hpp"

namespace frameparse {

namespace {

using sexpr::Node;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedFeature, what); }

struct SelectorName {
  Selector selector;
  const char* name;
};

constexpr SelectorName kSelectors[] = {
    {Selector::Synt, "SYNT"},   {Selector::Sem, "SEM"},       {Selector::Lex, "LEX"},
    {Selector::Surf, "SURF"},   {Selector::Tense, "TENSE"},   {Selector::Number, "NUMBER"},
    {Selector::Person, "PERSON"},
};

const char* selector_name(Selector s) {
  for (const auto& e : kSelectors)
    if (e.selector == s) return e.name;
  return "?";
}

int position(const Node& n) {
  auto v = sexpr::as_integer(n);
  if (!v || *v == 0 || *v > 100000 || *v < -100000) malformed("expected non-zero position");
  return static_cast<int>(*v);
}

Concept concept_arg(const Node& n) {
  if (!n.is_symbol()) malformed("expected concept");
  auto up = sexpr::upper(n.text);
  if (!Concept::valid(up)) malformed("bad concept " + n.text);
  return Concept(up);
}

std::string path_with_alt(const TreePath& path, const std::optional<Concept>& alt) {
  std::string out;
  for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it) out += *it + " OF ";
  if (alt) out += "(ALT " + alt->name() + ") OF ";
  return out + std::to_string(path.anchor);
}

// Reads `ROLE OF ... [(ALT C) OF] ANCHOR` starting at items[begin]; returns the
// index after the anchor.
std::size_t read_path(const std::vector<Node>& items, std::size_t begin, TreePath& path,
                      std::optional<Concept>* alt) {
  std::vector<std::string> toks;
  std::size_t i = begin;
  bool anchored = false;
  for (; i < items.size() && !anchored; ++i) {
    const Node& n = items[i];
    if (n.is_list()) {
      if (!alt || *alt || n.items.size() != 2 || !n.items[0].is_keyword("ALT"))
        malformed("only one (ALT concept) may appear inside a path");
      if (i + 2 >= items.size() || !items[i + 1].is_keyword("OF") || !sexpr::as_integer(items[i + 2]))
        malformed("(ALT ...) must sit right before OF and the anchor");
      *alt = concept_arg(n.items[1]);
      ++i;  // the OF joining ALT to the anchor
      continue;
    }
    if (!n.is_symbol()) malformed("path tokens must be symbols");
    anchored = sexpr::as_integer(n).has_value();
    toks.push_back(n.text);
  }
  if (!anchored) malformed("path without anchor");
  auto parsed = parse_path_tokens(toks);
  if (!parsed) malformed("bad path");
  path = *parsed;
  return i;
}

bool compatible_person(const Forms& a, const Forms& b) { return !a.person || !b.person || *a.person == *b.person; }
bool compatible_number(const Forms& a, const Forms& b) { return !a.number || !b.number || *a.number == *b.number; }

bool synt_isa(const ResourceBundle& bundle, const Frame& f, const Concept& c) {
  return bundle.kb.contains(f.synt) && bundle.kb.contains(c) && bundle.kb.isa(f.synt, c);
}

const Frame* select_anchor(const ParseState& state, const feature::Select& s, const ResourceBundle& bundle) {
  if (!s.alt) return anchor_frame(state, s.path.anchor);
  if (s.path.anchor > 0) {
    const InputItem* item = input_at(state, s.path.anchor);
    if (!item) return nullptr;
    if (const auto* w = std::get_if<WordUnit>(item)) {
      for (const auto& alt : w->alternatives)
        if (synt_isa(bundle, alt, *s.alt)) return &alt;
      return nullptr;
    }
    const auto& f = std::get<Frame>(*item);
    return synt_isa(bundle, f, *s.alt) ? &f : nullptr;
  }
  const Frame* f = stack_at(state, s.path.anchor);
  return f && synt_isa(bundle, *f, *s.alt) ? f : nullptr;
}

FeatureValue unavailable() { return FeatureValue(kUnavailable); }

FeatureValue flag(bool b) { return FeatureValue(b ? kTrue : kFalse); }

}  // namespace

FeatureDef parse_feature(std::string_view text) {
  Node n;
  try {
    n = sexpr::parse_one(text);
  } catch (const Error& e) {
    malformed(e.detail());
  }
  if (!n.is_list() || n.items.empty() || !n.items[0].is_symbol()) malformed("expected (KEYWORD ...)");
  const auto& it = n.items;
  const Node& head = it[0];

  for (const auto& e : kSelectors) {
    if (!head.is_keyword(e.name)) continue;
    if (it.size() < 3 || !it[1].is_keyword("OF")) malformed(std::string(e.name) + " needs OF and a path");
    feature::Select s;
    s.selector = e.selector;
    std::size_t next = read_path(it, 2, s.path, &s.alt);
    if (next < it.size()) {
      if (next + 2 != it.size() || !it[next].is_keyword("AT")) malformed("trailing tokens after the path");
      if (s.selector != Selector::Synt && s.selector != Selector::Sem)
        malformed("AT level only applies to SYNT and SEM");
      s.level = concept_arg(it[next + 1]);
    }
    return s;
  }
  if (head.is_keyword("EXISTS")) {
    if (it.size() < 2) malformed("EXISTS needs a path");
    feature::Exists e;
    if (read_path(it, 1, e.path, nullptr) != it.size()) malformed("trailing tokens after the path");
    return e;
  }
  if (head.is_keyword("AGREEMENT")) {
    if (it.size() != 3) malformed("AGREEMENT takes two positions");
    return feature::Agreement{position(it[1]), position(it[2])};
  }
  if (head.is_keyword("SEMROLE")) {
    if (it.size() != 3) malformed("SEMROLE takes two positions");
    return feature::SemRole{position(it[1]), position(it[2])};
  }
  malformed("unknown feature keyword " + head.text);
}

std::string to_text(const FeatureDef& def) {
  struct Printer {
    std::string operator()(const feature::Select& s) const {
      std::string out = std::string("(") + selector_name(s.selector) + " OF " + path_with_alt(s.path, s.alt);
      if (s.level) out += " AT " + s.level->name();
      return out + ")";
    }
    std::string operator()(const feature::Exists& e) const { return "(EXISTS " + to_text(e.path) + ")"; }
    std::string operator()(const feature::Agreement& a) const {
      return "(AGREEMENT " + std::to_string(a.a) + " " + std::to_string(a.b) + ")";
    }
    std::string operator()(const feature::SemRole& r) const {
      return "(SEMROLE " + std::to_string(r.arg) + " " + std::to_string(r.head) + ")";
    }
  };
  return std::visit(Printer{}, def);
}

FeatureValue eval_feature(const ParseState& state, const FeatureDef& def, const ResourceBundle& bundle) {
  struct Evaluator {
    const ParseState& state;
    const ResourceBundle& bundle;

    FeatureValue operator()(const feature::Select& s) const {
      const Frame* f = descend(select_anchor(state, s, bundle), s.path.steps);
      if (!f) return unavailable();
      std::optional<std::string> value;
      switch (s.selector) {
        case Selector::Synt: value = f->synt.name(); break;
        case Selector::Sem:
          if (f->sem) value = f->sem->name();
          break;
        case Selector::Lex: value = f->lex; break;
        case Selector::Surf: value = f->surface; break;
        case Selector::Tense: value = f->forms.tense; break;
        case Selector::Number:
          if (f->forms.number) value = *f->forms.number == Number::Sing ? "SING" : "PLUR";
          break;
        case Selector::Person:
          if (f->forms.person) value = std::to_string(*f->forms.person);
          break;
      }
      if (!value || value->empty()) return unavailable();
      if (s.level) {
        if (!Concept::valid(*value)) return unavailable();
        Concept c(*value);
        if (!bundle.kb.contains(c) || !bundle.kb.contains(*s.level)) return unavailable();
        auto g = bundle.kb.generalize(c, *s.level);
        if (!g) return unavailable();
        return g->name();
      }
      return *value;
    }

    FeatureValue operator()(const feature::Exists& e) const {
      const Frame* anchor = anchor_frame(state, e.path.anchor);
      if (!anchor) return unavailable();
      return flag(descend(anchor, e.path.steps) != nullptr);
    }

    FeatureValue operator()(const feature::Agreement& a) const {
      const Frame* x = anchor_frame(state, a.a);
      const Frame* y = anchor_frame(state, a.b);
      if (!x || !y) return unavailable();
      return flag(compatible_person(x->forms, y->forms) && compatible_number(x->forms, y->forms));
    }

    FeatureValue operator()(const feature::SemRole& r) const {
      const Frame* arg = anchor_frame(state, r.arg);
      const Frame* head = anchor_frame(state, r.head);
      if (!arg || !head) return unavailable();
      auto role = subcat_match(bundle, *head, *arg);
      return role ? *role : unavailable();
    }
  };
  return std::visit(Evaluator{state, bundle}, def);
}

FeatureSet::FeatureSet(std::vector<FeatureDef> defs) : defs_(std::move(defs)) {
  std::set<std::string> seen;
  for (const auto& d : defs_) {
    auto text = to_text(d);
    if (!seen.insert(text).second) malformed("duplicate feature " + text);
    texts_.push_back(std::move(text));
  }
}

FeatureSet FeatureSet::parse(std::string_view text) {
  std::vector<FeatureDef> defs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    auto comment = line.find(';');
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      defs.push_back(parse_feature(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedFeature, e.detail(), line_no);
    }
  }
  return FeatureSet(std::move(defs));
}

FeatureSet FeatureSet::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::vector<FeatureValue> eval_vector(const ParseState& state, const FeatureSet& features,
                                      const ResourceBundle& bundle) {
  std::vector<FeatureValue> out;
  out.reserve(features.size());
  for (const auto& d : features.defs()) out.push_back(eval_feature(state, d, bundle));
  return out;
}

std::vector<ParseExample> extract_examples(const std::vector<ActionLog>& logs, const FeatureSet& features,
                                           const ResourceBundle& bundle) {
  std::vector<ParseExample> out;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    auto result = replay(logs[i], bundle);
    for (std::size_t step = 0; step < logs[i].actions.size(); ++step)
      out.push_back(ParseExample{eval_vector(result.states[step], features, bundle), logs[i].actions[step], i, step});
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> find_conflicts(const std::vector<ParseExample>& examples) {
  std::map<std::vector<FeatureValue>, std::map<std::string, std::size_t>> seen;
  for (std::size_t i = 0; i < examples.size(); ++i) seen[examples[i].values].emplace(examples[i].action, i);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [vec, by_action] : seen) {
    if (by_action.size() < 2) continue;
    std::size_t first = by_action.begin()->second;
    for (auto it = std::next(by_action.begin()); it != by_action.end(); ++it)
      out.emplace_back(std::min(first, it->second), std::max(first, it->second));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string format_examples(const FeatureSet& features, const std::vector<ParseExample>& examples) {
  std::string out;
  for (const auto& t : features.texts()) out += t + "\t";
  out += "ACTION\n";
  for (const auto& e : examples) {
    for (const auto& v : e.values) out += v + "\t";
    out += e.action + "\n";
  }
  return out;
}

std::vector<ParseExample> parse_examples(std::string_view text, std::size_t feature_count) {
  std::vector<ParseExample> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (++line_no == 1 || line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t p = 0;
    for (;;) {
      auto tab = line.find('\t', p);
      cells.emplace_back(line.substr(p, tab == std::string_view::npos ? line.size() - p : tab - p));
      if (tab == std::string_view::npos) break;
      p = tab + 1;
    }
    if (cells.size() != feature_count + 1)
      throw Error(ErrorCode::MalformedFeature, "example row has " + std::to_string(cells.size()) + " cells", line_no);
    ParseExample e;
    e.action = cells.back();
    cells.pop_back();
    e.values = std::move(cells);
    e.step = out.size();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace frameparse
