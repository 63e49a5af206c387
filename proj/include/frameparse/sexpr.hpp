#pragma once

// Minimal s-expression reader/writer shared by every text format in the
// project (resources, actions, features, models, group configs).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace frameparse::sexpr {

struct Node {
  enum class Kind { Symbol, String, List };

  Kind kind = Kind::List;
  std::string text;  // symbol name or decoded string contents
  std::vector<Node> items;
  std::size_t line = 0;

  bool is_list() const { return kind == Kind::List; }
  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_string() const { return kind == Kind::String; }
  // Case-insensitive keyword test.
  bool is_keyword(std::string_view word) const;
  // Symbols and strings both count as atoms.
  bool is_atom() const { return kind != Kind::List; }

  static Node symbol(std::string s) { return Node{Kind::Symbol, std::move(s), {}, 0}; }
  static Node string(std::string s) { return Node{Kind::String, std::move(s), {}, 0}; }
  static Node list(std::vector<Node> xs = {}) { return Node{Kind::List, {}, std::move(xs), 0}; }
};

// Reads every top-level expression. `;` starts a comment running to end of line.
// Throws Error(MalformedSexpr) with a line number.
std::vector<Node> parse_all(std::string_view text);

// Exactly one top-level expression.
Node parse_one(std::string_view text);

std::optional<long long> as_integer(const Node& node);

std::string quote(std::string_view raw);

// Compact single-line rendering.
std::string write(const Node& node);

bool iequals(std::string_view a, std::string_view b);
std::string upper(std::string_view s);

}  // namespace frameparse::sexpr
