#include "frameparse/tree_text.hpp"

#include <charconv>
#include <vector>

#include "frameparse/error.hpp"
#include "frameparse/sexpr.hpp"

namespace frameparse {

namespace {

void render(const Frame& f, int depth, const RoleList* roles, std::string& out) {
  const std::string head(static_cast<std::size_t>(2 * depth), ' ');
  const std::string field = head + "  ";
  out += head;
  if (roles) {
    out += '(';
    for (std::size_t i = 0; i < roles->size(); ++i) {
      if (i) out += ' ';
      out += (*roles)[i];
    }
    out += ") ";
  }
  out += sexpr::quote(f.surface) + ":\n";

  if (f.sem)
    out += field + "synt/sem: " + f.synt.name() + "/" + f.sem->name() + "\n";
  else
    out += field + "synt: " + f.synt.name() + "\n";
  if (!f.forms.empty()) {
    out += field + "forms: (";
    auto toks = f.forms.tokens();
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) out += ' ';
      out += toks[i];
    }
    out += ")\n";
  }
  if (f.lex != f.surface) out += field + "lex: " + sexpr::quote(f.lex) + "\n";
  if (f.is_leaf() && f.span) {
    if (f.span->width() == 1)
      out += field + "token: " + std::to_string(f.span->start) + "\n";
    else
      out += field + "tokens: " + std::to_string(f.span->start) + " " +
             std::to_string(f.span->end) + "\n";
  }
  if (!f.extras.empty()) {
    out += field + "extras:";
    for (const auto& [k, v] : f.extras) out += " (" + k + " " + sexpr::quote(v) + ")";
    out += "\n";
  }
  if (!f.subs.empty()) {
    out += field + "subs:\n";
    for (const auto& sub : f.subs) render(sub.child, depth + 1, &sub.roles, out);
  }
}

struct Line {
  std::size_t number;
  std::size_t indent;
  std::string_view body;
};

class TreeReader {
 public:
  explicit TreeReader(std::string_view text) {
    std::size_t number = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      std::size_t indent = raw.find_first_not_of(' ');
      if (indent != std::string_view::npos) lines_.push_back({number, indent, raw.substr(indent)});
      else if (!raw.empty()) lines_.push_back({number, raw.size(), {}});
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
      ++number;
    }
  }

  Frame read_root() {
    if (lines_.empty()) fail(1, "empty tree text");
    Frame root = read_frame(0, false).frame;
    if (next_ < lines_.size()) fail(lines_[next_].number, "trailing content after root frame");
    return root;
  }

 private:
  [[noreturn]] static void fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::MalformedTree, what, line);
  }

  const Line* peek() const { return next_ < lines_.size() ? &lines_[next_] : nullptr; }

  // Parses `"text":` possibly preceded by `(ROLES) `.
  static std::pair<std::optional<RoleList>, std::string> parse_header(const Line& line) {
    std::string_view body = line.body;
    std::optional<RoleList> roles;
    if (!body.empty() && body.front() == '(') {
      auto close = body.find(')');
      if (close == std::string_view::npos) fail(line.number, "unterminated role list");
      RoleList rs;
      std::string_view inner = body.substr(1, close - 1);
      std::size_t p = 0;
      while (p < inner.size()) {
        auto sp = inner.find(' ', p);
        auto tok = inner.substr(p, sp == std::string_view::npos ? inner.size() - p : sp - p);
        if (tok.empty() || !valid_role(tok)) fail(line.number, "bad role symbol");
        rs.emplace_back(tok);
        if (sp == std::string_view::npos) break;
        p = sp + 1;
      }
      if (rs.empty()) fail(line.number, "empty role list");
      roles = std::move(rs);
      body.remove_prefix(close + 1);
      if (body.empty() || body.front() != ' ') fail(line.number, "expected space after roles");
      body.remove_prefix(1);
    }
    if (body.size() < 3 || body.front() != '"' || body.back() != ':')
      fail(line.number, "expected quoted surface followed by ':'");
    std::string_view quoted = body.substr(0, body.size() - 1);
    sexpr::Node node;
    try {
      node = sexpr::parse_one(quoted);
    } catch (const Error&) {
      fail(line.number, "bad quoted surface");
    }
    if (!node.is_string() || sexpr::quote(node.text) != quoted)
      fail(line.number, "non-canonical quoted surface");
    return {std::move(roles), node.text};
  }

  static Concept concept_at(const Line& line, std::string_view s) {
    if (!Concept::valid(s)) fail(line.number, "bad concept '" + std::string(s) + "'");
    return Concept(std::string(s));
  }

  static int integer_at(const Line& line, std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) fail(line.number, "bad integer");
    return v;
  }

  struct Parsed {
    std::optional<RoleList> roles;
    Frame frame;
  };

  Parsed read_frame(std::size_t indent, bool expect_roles) {
    const Line& header = lines_[next_];
    if (header.indent != indent) fail(header.number, "bad indentation");
    auto [roles, surface] = parse_header(header);
    if (roles.has_value() != expect_roles)
      fail(header.number, expect_roles ? "missing role list" : "unexpected role list on root");
    ++next_;

    Frame f;
    f.surface = surface;
    f.lex = surface;
    const std::size_t field_indent = indent + 2;

    auto field_line = [&](std::string_view prefix) -> const Line* {
      const Line* l = peek();
      if (!l || l->indent != field_indent || !l->body.starts_with(prefix)) return nullptr;
      ++next_;
      return l;
    };

    if (const Line* l = field_line("synt/sem: ")) {
      auto rest = l->body.substr(10);
      auto slash = rest.find('/');
      if (slash == std::string_view::npos) fail(l->number, "expected synt/sem pair");
      f.synt = concept_at(*l, rest.substr(0, slash));
      f.sem = concept_at(*l, rest.substr(slash + 1));
    } else if (const Line* l2 = field_line("synt: ")) {
      f.synt = concept_at(*l2, l2->body.substr(6));
    } else {
      fail(peek() ? peek()->number : header.number, "missing synt line");
    }

    if (const Line* l = field_line("forms: ")) {
      auto rest = l->body.substr(7);
      if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')') fail(l->number, "bad forms list");
      std::vector<std::string> toks;
      std::string_view inner = rest.substr(1, rest.size() - 2);
      std::size_t p = 0;
      for (;;) {
        auto sp = inner.find(' ', p);
        auto tok = inner.substr(p, sp == std::string_view::npos ? inner.size() - p : sp - p);
        if (tok.empty()) fail(l->number, "bad forms list");
        toks.emplace_back(tok);
        if (sp == std::string_view::npos) break;
        p = sp + 1;
      }
      f.forms = Forms::from_tokens(toks);
      if (f.forms.tokens() != toks) fail(l->number, "non-canonical forms list");
    }

    if (const Line* l = field_line("lex: ")) {
      sexpr::Node node;
      try {
        node = sexpr::parse_one(l->body.substr(5));
      } catch (const Error&) {
        fail(l->number, "bad lex string");
      }
      if (!node.is_string()) fail(l->number, "lex must be quoted");
      if (node.text == surface) fail(l->number, "redundant lex line");
      f.lex = node.text;
    }

    std::optional<Span> leaf_span;
    if (const Line* l = field_line("token: ")) {
      int t = integer_at(*l, l->body.substr(7));
      leaf_span = Span{t, t + 1};
    } else if (const Line* l2 = field_line("tokens: ")) {
      auto rest = l2->body.substr(8);
      auto sp = rest.find(' ');
      if (sp == std::string_view::npos) fail(l2->number, "expected two token bounds");
      leaf_span = Span{integer_at(*l2, rest.substr(0, sp)), integer_at(*l2, rest.substr(sp + 1))};
      if (leaf_span->width() <= 1) fail(l2->number, "non-canonical tokens line");
    }

    if (const Line* l = field_line("extras:")) {
      sexpr::Node node;
      try {
        node = sexpr::parse_one("(" + std::string(l->body.substr(7)) + ")");
      } catch (const Error&) {
        fail(l->number, "bad extras");
      }
      for (const auto& kv : node.items) {
        if (!kv.is_list() || kv.items.size() != 2 || !kv.items[0].is_symbol() || !kv.items[1].is_string())
          fail(l->number, "bad extras entry");
        f.extras[kv.items[0].text] = kv.items[1].text;
      }
      if (f.extras.empty()) fail(l->number, "empty extras line");
    }

    if (const Line* l = field_line("subs:")) {
      if (l->body != "subs:") fail(l->number, "bad subs line");
      if (leaf_span) fail(l->number, "inner frame with token line");
      while (const Line* c = peek()) {
        if (c->indent != field_indent || c->body.empty() || c->body.front() != '(') break;
        Parsed child = read_frame(field_indent, true);
        f.subs.push_back(Subframe{std::move(*child.roles), std::move(child.frame)});
      }
      if (f.subs.empty()) fail(l->number, "subs without children");
      std::optional<Span> hull;
      for (const auto& s : f.subs) {
        if (!s.child.span) continue;
        hull = hull ? Span{std::min(hull->start, s.child.span->start), std::max(hull->end, s.child.span->end)}
                    : *s.child.span;
      }
      f.span = hull;
      Frame derived = f;
      refresh_derived(derived);
      if (derived.surface != f.surface) fail(header.number, "surface differs from its children");
    } else {
      f.span = leaf_span;
    }

    // Anything indented deeper than this header now is out of place.
    if (const Line* l = peek(); l && l->indent > indent) fail(l->number, "unexpected line");
    return Parsed{std::move(roles), std::move(f)};
  }

  std::vector<Line> lines_;
  std::size_t next_ = 0;
};

}  // namespace

std::string render_tree(const Frame& frame) {
  std::string out;
  render(frame, 0, nullptr, out);
  return out;
}

Frame parse_tree_text(std::string_view text) { return TreeReader(text).read_root(); }

}  // namespace frameparse
