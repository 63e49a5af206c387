#include "frameparse/sexpr.hpp"

#include <cctype>
#include <charconv>

#include "frameparse/error.hpp"

namespace frameparse::sexpr {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) !=
        std::toupper(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool Node::is_keyword(std::string_view word) const {
  return kind == Kind::Symbol && iequals(text, word);
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<Node> read_all() {
    std::vector<Node> out;
    for (;;) {
      skip_space();
      if (at_end()) break;
      out.push_back(read());
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (!at_end() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedSexpr, what, line_);
  }

  Node read() {
    skip_space();
    if (at_end()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      Node node = Node::list();
      node.line = line_;
      ++pos_;
      for (;;) {
        skip_space();
        if (at_end()) fail("unterminated list");
        if (text_[pos_] == ')') {
          ++pos_;
          return node;
        }
        node.items.push_back(read());
      }
    }
    if (c == ')') fail("unexpected ')'");
    if (c == '"') return read_string();
    return read_symbol();
  }

  Node read_string() {
    Node node = Node::string({});
    node.line = line_;
    ++pos_;
    for (;;) {
      if (at_end()) fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') return node;
      if (c == '\\') {
        if (at_end()) fail("dangling escape");
        char e = text_[pos_++];
        if (e == 'n')
          node.text.push_back('\n');
        else if (e == 't')
          node.text.push_back('\t');
        else
          node.text.push_back(e);
        continue;
      }
      if (c == '\n') ++line_;
      node.text.push_back(c);
    }
  }

  Node read_symbol() {
    Node node = Node::symbol({});
    node.line = line_;
    while (!at_end()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
          c == '"' || c == ';')
        break;
      node.text.push_back(c);
      ++pos_;
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

std::vector<Node> parse_all(std::string_view text) { return Reader(text).read_all(); }

Node parse_one(std::string_view text) {
  auto nodes = parse_all(text);
  if (nodes.size() != 1)
    throw Error(ErrorCode::MalformedSexpr,
                "expected one expression, found " + std::to_string(nodes.size()));
  return std::move(nodes.front());
}

std::optional<long long> as_integer(const Node& node) {
  if (!node.is_symbol() || node.text.empty()) return std::nullopt;
  std::string_view s = node.text;
  if (s.front() == '+') s.remove_prefix(1);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::string quote(std::string_view raw) {
  std::string out;
  out.reserve(raw.size() + 2);
  out.push_back('"');
  for (char c : raw) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
      out.push_back(c);
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string write(const Node& node) {
  switch (node.kind) {
    case Node::Kind::Symbol: return node.text;
    case Node::Kind::String: return quote(node.text);
    case Node::Kind::List: {
      std::string out = "(";
      for (std::size_t i = 0; i < node.items.size(); ++i) {
        if (i) out.push_back(' ');
        out += write(node.items[i]);
      }
      out.push_back(')');
      return out;
    }
  }
  return {};
}

}  // namespace frameparse::sexpr
