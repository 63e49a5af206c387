#include "frameparse/frame.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

#include "frameparse/error.hpp"
#include "frameparse/sexpr.hpp"

namespace frameparse {

namespace {

bool concept_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '?' || c == '*' ||
         c == '.' || c == '_' || c == '-';
}

void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace

Concept::Concept(std::string name) : name_(std::move(name)) {
  if (!valid(name_)) throw Error(ErrorCode::InvalidSymbol, "bad concept '" + name_ + "'");
}

bool Concept::valid(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), concept_char);
}

bool valid_role(std::string_view role) { return Concept::valid(role); }

std::string_view to_string(Number n) { return n == Number::Sing ? "sing" : "plur"; }

std::vector<std::string> Forms::tokens() const {
  std::vector<std::string> out;
  if (person) {
    static constexpr const char* kNames[] = {"1st_person", "2nd_person", "3rd_person"};
    out.emplace_back(kNames[*person - 1]);
  }
  if (number) out.emplace_back(to_string(*number));
  if (tense) out.push_back(*tense);
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

Forms Forms::from_tokens(const std::vector<std::string>& tokens) {
  Forms f;
  for (const auto& t : tokens) {
    if (t == "1st_person")
      f.person = 1;
    else if (t == "2nd_person")
      f.person = 2;
    else if (t == "3rd_person")
      f.person = 3;
    else if (t == "sing")
      f.number = Number::Sing;
    else if (t == "plur")
      f.number = Number::Plur;
    else if (t.size() > 6 && t.ends_with("_tense"))
      f.tense = t;
    else
      f.extra.insert(t);
  }
  return f;
}

bool Frame::has_role(std::string_view role) const { return child_with_role(role) != nullptr; }

const Frame* Frame::child_with_role(std::string_view role) const {
  for (const auto& sub : subs)
    if (std::find(sub.roles.begin(), sub.roles.end(), role) != sub.roles.end()) return &sub.child;
  return nullptr;
}

Frame* Frame::child_with_role(std::string_view role) {
  return const_cast<Frame*>(std::as_const(*this).child_with_role(role));
}

bool operator==(const Subframe& a, const Subframe& b) {
  return a.roles == b.roles && a.child == b.child;
}

bool operator==(const Frame& a, const Frame& b) {
  return a.surface == b.surface && a.lex == b.lex && a.synt == b.synt && a.sem == b.sem &&
         a.forms == b.forms && a.span == b.span && a.extras == b.extras && a.subs == b.subs;
}

std::size_t hash_value(const Frame& f) {
  std::hash<std::string> h;
  std::size_t seed = h(f.surface);
  hash_combine(seed, h(f.lex));
  hash_combine(seed, h(f.synt.name()));
  hash_combine(seed, f.sem ? h(f.sem->name()) : 0x51);
  for (const auto& t : f.forms.tokens()) hash_combine(seed, h(t));
  if (f.span) {
    hash_combine(seed, static_cast<std::size_t>(f.span->start));
    hash_combine(seed, static_cast<std::size_t>(f.span->end));
  }
  for (const auto& [k, v] : f.extras) {
    hash_combine(seed, h(k));
    hash_combine(seed, h(v));
  }
  for (const auto& sub : f.subs) {
    for (const auto& r : sub.roles) hash_combine(seed, h(r));
    hash_combine(seed, hash_value(sub.child));
  }
  return seed;
}

std::string join_surface(const std::vector<std::string>& parts) {
  auto attaches_left = [](const std::string& t) {
    static const std::string kClosing = ".,;:!?)";
    return (t.size() == 1 && kClosing.find(t[0]) != std::string::npos) ||
           (!t.empty() && t[0] == '\'');
  };
  std::string out;
  bool suppress_space = true;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!suppress_space && !attaches_left(p)) out.push_back(' ');
    out += p;
    suppress_space = (p == "(");
  }
  return out;
}

void refresh_derived(Frame& frame) {
  if (frame.subs.empty()) return;
  std::vector<std::string> parts;
  std::optional<Span> span;
  for (const auto& sub : frame.subs) {
    if (!sub.child.span) continue;
    parts.push_back(sub.child.surface);
    if (!span)
      span = sub.child.span;
    else
      span = Span{std::min(span->start, sub.child.span->start),
                  std::max(span->end, sub.child.span->end)};
  }
  frame.span = span;
  frame.surface = join_surface(parts);
}

std::optional<std::string> check_frame(const Frame& frame) {
  if (frame.span && frame.span->width() < 1)
    return "empty span on '" + frame.surface + "'";
  if (frame.subs.empty()) return std::nullopt;
  int preds = 0;
  int covered = 0;
  std::optional<Span> prev;
  std::optional<Span> hull;
  for (const auto& sub : frame.subs) {
    if (sub.roles.empty()) return "subframe without roles under '" + frame.surface + "'";
    if (std::find(sub.roles.begin(), sub.roles.end(), "PRED") != sub.roles.end()) ++preds;
    if (auto bad = check_frame(sub.child)) return bad;
    const auto& s = sub.child.span;
    if (!s) continue;
    if (prev && s->start < prev->end) return "overlapping or unordered children under '" + frame.surface + "'";
    prev = s;
    covered += s->width();
    hull = hull ? Span{std::min(hull->start, s->start), std::max(hull->end, s->end)} : *s;
  }
  if (preds > 1) return "more than one PRED under '" + frame.surface + "'";
  if (hull && covered != hull->width()) return "non-contiguous children under '" + frame.surface + "'";
  if (hull != frame.span) return "span mismatch on '" + frame.surface + "'";
  return std::nullopt;
}

const Frame& default_frame(const InputItem& item) {
  if (const auto* w = std::get_if<WordUnit>(&item)) return w->alternatives.front();
  return std::get<Frame>(item);
}

std::optional<Span> item_span(const InputItem& item) {
  if (const auto* w = std::get_if<WordUnit>(&item)) return w->span;
  return std::get<Frame>(item).span;
}

bool same_configuration(const ParseState& a, const ParseState& b) {
  return a.stack == b.stack && a.input == b.input;
}

std::size_t configuration_hash(const ParseState& s) {
  std::size_t seed = s.stack.size();
  for (const auto& f : s.stack) hash_combine(seed, hash_value(f));
  hash_combine(seed, 0xabcdef);
  for (const auto& item : s.input) {
    if (const auto* w = std::get_if<WordUnit>(&item)) {
      hash_combine(seed, 1);
      for (const auto& alt : w->alternatives) hash_combine(seed, hash_value(alt));
    } else {
      hash_combine(seed, 2);
      hash_combine(seed, hash_value(std::get<Frame>(item)));
    }
  }
  return seed;
}

std::string to_text(const TreePath& path) {
  std::string out;
  for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it) out += *it + " OF ";
  out += std::to_string(path.anchor);
  return out;
}

const Frame* stack_at(const ParseState& state, int anchor) {
  if (anchor >= 0) return nullptr;
  auto k = static_cast<std::size_t>(-anchor);
  if (k > state.stack.size()) return nullptr;
  return &state.stack[state.stack.size() - k];
}

const InputItem* input_at(const ParseState& state, int anchor) {
  if (anchor <= 0) return nullptr;
  auto k = static_cast<std::size_t>(anchor);
  if (k > state.input.size()) return nullptr;
  return &state.input[k - 1];
}

const Frame* anchor_frame(const ParseState& state, int anchor) {
  if (anchor < 0) return stack_at(state, anchor);
  if (const auto* item = input_at(state, anchor)) return &default_frame(*item);
  return nullptr;
}

const Frame* descend(const Frame* root, const std::vector<std::string>& steps) {
  for (const auto& step : steps) {
    if (!root) return nullptr;
    root = root->child_with_role(step);
  }
  return root;
}

const Frame* resolve_path(const ParseState& state, const TreePath& path) {
  return descend(anchor_frame(state, path.anchor), path.steps);
}

std::optional<TreePath> parse_path_tokens(const std::vector<std::string>& tokens) {
  if (tokens.empty() || tokens.size() % 2 == 0) return std::nullopt;
  TreePath path;
  auto anchor = sexpr::as_integer(sexpr::Node::symbol(tokens.back()));
  if (!anchor || *anchor == 0 || *anchor > 1'000'000 || *anchor < -1'000'000) return std::nullopt;
  path.anchor = static_cast<int>(*anchor);
  for (std::size_t i = 0; i + 1 < tokens.size(); i += 2) {
    std::string role = sexpr::upper(tokens[i]);
    if (!valid_role(role) || sexpr::as_integer(sexpr::Node::symbol(role))) return std::nullopt;
    if (!sexpr::iequals(tokens[i + 1], "OF")) return std::nullopt;
    path.steps.push_back(std::move(role));
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

}  // namespace frameparse
