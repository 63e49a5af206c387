#include "frameparse/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "frameparse/action.hpp"
#include "frameparse/error.hpp"
#include "frameparse/resources.hpp"

namespace frameparse {

namespace {

using sexpr::Node;
using Indices = std::vector<std::size_t>;
using Counts = std::map<std::string, std::size_t>;

const FeatureValue& value_at(const std::vector<FeatureValue>& values, std::size_t f) {
  static const FeatureValue unavailable(kUnavailable);
  return f < values.size() ? values[f] : unavailable;
}

Counts label_counts(const std::vector<ParseExample>& ex, const Indices& idx) {
  Counts c;
  for (auto i : idx) ++c[ex[i].action];
  return c;
}

// Largest count; ties go to the lexicographically smallest label (map order).
const std::string& majority(const Counts& c) {
  auto best = c.begin();
  for (auto it = c.begin(); it != c.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

double entropy_of(const Counts& c) {
  std::vector<std::size_t> v;
  v.reserve(c.size());
  for (const auto& [_, n] : c) v.push_back(n);
  return entropy(v);
}

std::map<FeatureValue, Indices> partition(const std::vector<ParseExample>& ex, const Indices& idx, std::size_t f) {
  std::map<FeatureValue, Indices> parts;
  for (auto i : idx) parts[value_at(ex[i].values, f)].push_back(i);
  return parts;
}

double gain_of(const std::vector<ParseExample>& ex, const Indices& idx, double base,
               const std::map<FeatureValue, Indices>& parts) {
  double rest = 0.0;
  for (const auto& [_, sub] : parts)
    rest += static_cast<double>(sub.size()) / static_cast<double>(idx.size()) * entropy_of(label_counts(ex, sub));
  return base - rest;
}

std::size_t feature_count(const std::vector<ParseExample>& ex) {
  std::size_t n = 0;
  for (const auto& e : ex) n = std::max(n, e.values.size());
  return n;
}

DecisionTree grow(const std::vector<ParseExample>& ex, const Indices& idx, std::size_t nfeat) {
  DecisionTree node;
  node.distribution = label_counts(ex, idx);
  node.action = majority(node.distribution);
  node.support = idx.size();
  if (node.distribution.size() == 1) return node;

  double base = entropy_of(node.distribution);
  std::optional<std::size_t> best;
  double best_gain = -1.0;
  std::map<FeatureValue, Indices> best_parts;
  for (std::size_t f = 0; f < nfeat; ++f) {
    auto parts = partition(ex, idx, f);
    if (parts.size() < 2) continue;
    double g = gain_of(ex, idx, base, parts);
    if (g > best_gain) {
      best_gain = g;
      best = f;
      best_parts = std::move(parts);
    }
  }
  if (!best) return node;  // identical vectors with different actions

  node.feature = best;
  std::size_t default_size = 0;
  for (auto& [value, sub] : best_parts) {
    if (sub.size() > default_size) {
      default_size = sub.size();
      node.default_value = value;
    }
    node.branches.push_back(TreeBranch{value, grow(ex, sub, nfeat)});
  }
  return node;
}

Indices all_indices(std::size_t n) {
  Indices idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

DecisionList grow_list(const std::vector<ParseExample>& ex, Indices remaining) {
  DecisionList list;
  list.default_action = majority(label_counts(ex, remaining));
  std::size_t nfeat = feature_count(ex);

  while (!remaining.empty()) {
    Counts rest = label_counts(ex, remaining);
    if (rest.size() == 1 && rest.begin()->first == list.default_action) break;

    Rule rule;
    Indices covered = remaining;
    std::set<std::size_t> used;
    for (;;) {
      Counts dist = label_counts(ex, covered);
      bool pure = dist.size() == 1;
      if (pure && !rule.tests.empty()) break;

      struct Candidate {
        std::size_t feature;
        FeatureValue value;
        Indices sub;
        std::size_t hits;
      };
      std::optional<Candidate> best;
      auto better = [](const Candidate& a, const Candidate& b) {
        // purity a.hits/a.size vs b.hits/b.size, then coverage; index and value
        // order is already the scan order.
        auto lhs = a.hits * b.sub.size();
        auto rhs = b.hits * a.sub.size();
        if (lhs != rhs) return lhs > rhs;
        return a.sub.size() > b.sub.size();
      };
      for (std::size_t f = 0; f < nfeat; ++f) {
        if (used.count(f)) continue;
        for (auto& [value, sub] : partition(ex, covered, f)) {
          if (!pure && sub.size() == covered.size()) continue;
          Counts c = label_counts(ex, sub);
          Candidate cand{f, value, sub, c.at(majority(c))};
          if (!best || better(cand, *best)) best = std::move(cand);
        }
      }
      if (!best) break;  // conflicting residue
      used.insert(best->feature);
      rule.tests.emplace_back(best->feature, best->value);
      covered = std::move(best->sub);
    }

    rule.action = majority(label_counts(ex, covered));
    rule.support = covered.size();
    std::set<std::size_t> gone(covered.begin(), covered.end());
    Indices next;
    for (auto i : remaining)
      if (!gone.count(i)) next.push_back(i);
    remaining = std::move(next);
    list.rules.push_back(std::move(rule));
  }
  return list;
}

std::vector<ParseExample> subset(const std::vector<ParseExample>& ex, const Indices& idx) {
  std::vector<ParseExample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(ex[i]);
  return out;
}

BaseStructure train_base(const std::vector<ParseExample>& ex, bool lists) {
  if (lists) return train_dlist(ex);
  return train_id3(ex);
}

bool match_items(const std::vector<Node>& pat, std::size_t pi, const std::vector<Node>& xs, std::size_t xi);

bool match_node(const Node& p, const Node& x) {
  if (p.is_list() != x.is_list()) return false;
  if (p.is_list()) return match_items(p.items, 0, x.items, 0);
  return sexpr::iequals(p.text, x.text);
}

bool match_items(const std::vector<Node>& pat, std::size_t pi, const std::vector<Node>& xs, std::size_t xi) {
  if (pi == pat.size()) return xi == xs.size();
  if (pat[pi].is_symbol() && pat[pi].text == "*") {
    for (std::size_t k = xi; k <= xs.size(); ++k)
      if (match_items(pat, pi + 1, xs, k)) return true;
    return false;
  }
  return xi < xs.size() && match_node(pat[pi], xs[xi]) && match_items(pat, pi + 1, xs, xi + 1);
}

// Classification

void walk_tree(const DecisionTree& t, const std::vector<FeatureValue>& values, const std::string& stage,
               Classification& out) {
  const DecisionTree* node = &t;
  while (!node->is_leaf()) {
    const auto& v = value_at(values, *node->feature);
    Decision d{stage, node->feature, v, v, false};
    auto it = std::find_if(node->branches.begin(), node->branches.end(),
                           [&](const TreeBranch& b) { return b.value == v; });
    if (it == node->branches.end()) {
      d.used_default = true;
      d.taken = node->default_value;
      it = std::find_if(node->branches.begin(), node->branches.end(),
                        [&](const TreeBranch& b) { return b.value == node->default_value; });
    }
    out.trace.push_back(std::move(d));
    node = &it->subtree;
  }
  out.action = node->action;
}

void walk_list(const DecisionList& l, const std::vector<FeatureValue>& values, const std::string& stage,
               Classification& out) {
  for (std::size_t r = 0; r < l.rules.size(); ++r) {
    const Rule& rule = l.rules[r];
    bool hit = std::all_of(rule.tests.begin(), rule.tests.end(),
                           [&](const auto& t) { return value_at(values, t.first) == t.second; });
    if (!hit) continue;
    for (const auto& [f, v] : rule.tests)
      out.trace.push_back(Decision{stage + " rule " + std::to_string(r + 1), f, v, v, false});
    out.action = rule.action;
    return;
  }
  out.trace.push_back(Decision{stage + " default", std::nullopt, {}, {}, true});
  out.action = l.default_action;
}

void walk_base(const BaseStructure& b, const std::vector<FeatureValue>& values, const std::string& stage,
               Classification& out) {
  if (const auto* t = std::get_if<DecisionTree>(&b))
    walk_tree(*t, values, stage, out);
  else
    walk_list(std::get<DecisionList>(b), values, stage, out);
}

void walk_hier(const Hierarchical& h, const std::vector<FeatureValue>& values, const std::string& prefix,
               Classification& out) {
  walk_base(h.classes, values, prefix + "class", out);
  auto it = h.per_class.find(out.action);
  if (it == h.per_class.end()) return;  // unreachable on consistent structures
  walk_base(it->second, values, prefix + out.action, out);
}

// Stats

struct Size {
  std::size_t nodes = 0;
  std::size_t depth = 0;
};

Size tree_size(const DecisionTree& t) {
  Size s{1, 0};
  for (const auto& b : t.branches) {
    Size c = tree_size(b.subtree);
    s.nodes += c.nodes;
    s.depth = std::max(s.depth, c.depth + 1);
  }
  return s;
}

Size base_size(const BaseStructure& b) {
  if (const auto* t = std::get_if<DecisionTree>(&b)) return tree_size(*t);
  const auto& l = std::get<DecisionList>(b);
  Size s{l.rules.size() + 1, 0};
  for (const auto& r : l.rules) s.depth = std::max(s.depth, r.tests.size());
  return s;
}

Size hier_size(const Hierarchical& h) {
  Size s = base_size(h.classes);
  std::size_t inner = 0;
  for (const auto& [_, b] : h.per_class) {
    Size c = base_size(b);
    s.nodes += c.nodes;
    inner = std::max(inner, c.depth);
  }
  s.depth += inner;
  return s;
}

Size structure_size(const Structure& s) {
  struct V {
    Size operator()(const DecisionTree& t) const { return tree_size(t); }
    Size operator()(const DecisionList& l) const { return base_size(l); }
    Size operator()(const Hierarchical& h) const { return hier_size(h); }
    Size operator()(const Hybrid& h) const {
      Size out{0, 0};
      for (const auto& g : h.groups) {
        Size gate = tree_size(g.gate), body = hier_size(g.body);
        out.nodes += gate.nodes + body.nodes;
        out.depth = std::max(out.depth, gate.depth + body.depth);
      }
      if (h.default_body) {
        Size d = hier_size(*h.default_body);
        out.nodes += d.nodes;
        out.depth = std::max(out.depth, d.depth);
      }
      return out;
    }
  };
  return std::visit(V{}, s);
}

// Serialization

[[noreturn]] void bad(const std::string& what, const Node* at = nullptr) {
  throw Error(ErrorCode::MalformedStructure, what, at ? at->line : 0);
}

Node sym(std::string s) { return Node::symbol(std::move(s)); }
Node str(std::string s) { return Node::string(std::move(s)); }
Node num(std::size_t n) { return Node::symbol(std::to_string(n)); }

Node tagged(std::string tag, std::vector<Node> rest) {
  std::vector<Node> items;
  items.reserve(rest.size() + 1);
  items.push_back(sym(std::move(tag)));
  for (auto& n : rest) items.push_back(std::move(n));
  return Node::list(std::move(items));
}

Node dist_node(const Counts& c) {
  std::vector<Node> items;
  for (const auto& [a, n] : c) items.push_back(Node::list({str(a), num(n)}));
  return tagged("dist", std::move(items));
}

Node tree_node(const DecisionTree& t) {
  if (t.is_leaf()) return tagged("leaf", {str(t.action), num(t.support), dist_node(t.distribution)});
  std::vector<Node> items{num(*t.feature), str(t.default_value), str(t.action), num(t.support),
                          dist_node(t.distribution)};
  for (const auto& b : t.branches) items.push_back(tagged("branch", {str(b.value), tree_node(b.subtree)}));
  return tagged("node", std::move(items));
}

Node list_node(const DecisionList& l) {
  std::vector<Node> items{tagged("default", {str(l.default_action)})};
  for (const auto& r : l.rules) {
    std::vector<Node> rule{str(r.action), num(r.support)};
    for (const auto& [f, v] : r.tests) rule.push_back(Node::list({num(f), str(v)}));
    items.push_back(tagged("rule", std::move(rule)));
  }
  return tagged("dlist", std::move(items));
}

Node base_node(const BaseStructure& b) {
  if (const auto* t = std::get_if<DecisionTree>(&b)) return tree_node(*t);
  return list_node(std::get<DecisionList>(b));
}

Node hier_node(const Hierarchical& h) {
  std::vector<Node> items{tagged("classes", {base_node(h.classes)})};
  for (const auto& [c, b] : h.per_class) items.push_back(tagged("class", {str(c), base_node(b)}));
  return tagged("hier", std::move(items));
}

Node group_spec_node(const GroupSpec& g) {
  std::vector<Node> items;
  for (const auto& p : g.patterns) items.push_back(p.pattern);
  return tagged("patterns", std::move(items));
}

Node hybrid_node(const Hybrid& h) {
  std::vector<Node> items{tagged("fallback", {str(h.fallback)})};
  for (const auto& g : h.groups)
    items.push_back(tagged("group", {sym(g.spec.name), group_spec_node(g.spec), tagged("gate", {tree_node(g.gate)}),
                                     tagged("body", {hier_node(g.body)})}));
  if (h.default_body) items.push_back(tagged("default", {hier_node(*h.default_body)}));
  return tagged("hybrid", std::move(items));
}

bool has_tag(const Node& n, std::string_view tag) {
  return n.is_list() && !n.items.empty() && n.items[0].is_keyword(tag);
}

const Node& expect_tag(const Node& n, std::string_view tag, std::size_t min_items) {
  if (!has_tag(n, tag) || n.items.size() < min_items) bad("expected (" + std::string(tag) + " ...)", &n);
  return n;
}

std::string read_string(const Node& n) {
  if (!n.is_string()) bad("expected string", &n);
  return n.text;
}

std::size_t read_count(const Node& n) {
  auto v = sexpr::as_integer(n);
  if (!v || *v < 0) bad("expected count", &n);
  return static_cast<std::size_t>(*v);
}

Counts read_dist(const Node& n) {
  expect_tag(n, "dist", 1);
  Counts c;
  for (std::size_t i = 1; i < n.items.size(); ++i) {
    const auto& e = n.items[i];
    if (!e.is_list() || e.items.size() != 2) bad("bad distribution entry", &e);
    c[read_string(e.items[0])] = read_count(e.items[1]);
  }
  return c;
}

DecisionTree read_tree(const Node& n) {
  DecisionTree t;
  if (has_tag(n, "leaf")) {
    if (n.items.size() != 4) bad("leaf takes action, support, dist", &n);
    t.action = read_string(n.items[1]);
    t.support = read_count(n.items[2]);
    t.distribution = read_dist(n.items[3]);
    if (t.support == 0) bad("leaf without support", &n);
    return t;
  }
  expect_tag(n, "node", 7);
  t.feature = read_count(n.items[1]);
  t.default_value = read_string(n.items[2]);
  t.action = read_string(n.items[3]);
  t.support = read_count(n.items[4]);
  t.distribution = read_dist(n.items[5]);
  bool default_found = false;
  for (std::size_t i = 6; i < n.items.size(); ++i) {
    const auto& b = expect_tag(n.items[i], "branch", 3);
    if (b.items.size() != 3) bad("branch takes value and subtree", &b);
    TreeBranch br{read_string(b.items[1]), read_tree(b.items[2])};
    default_found |= br.value == t.default_value;
    t.branches.push_back(std::move(br));
  }
  if (!default_found) bad("default branch missing", &n);
  return t;
}

DecisionList read_list(const Node& n) {
  expect_tag(n, "dlist", 2);
  DecisionList l;
  const auto& d = expect_tag(n.items[1], "default", 2);
  l.default_action = read_string(d.items[1]);
  for (std::size_t i = 2; i < n.items.size(); ++i) {
    const auto& r = expect_tag(n.items[i], "rule", 3);
    Rule rule;
    rule.action = read_string(r.items[1]);
    rule.support = read_count(r.items[2]);
    for (std::size_t k = 3; k < r.items.size(); ++k) {
      const auto& t = r.items[k];
      if (!t.is_list() || t.items.size() != 2) bad("bad rule test", &t);
      rule.tests.emplace_back(read_count(t.items[0]), read_string(t.items[1]));
    }
    l.rules.push_back(std::move(rule));
  }
  return l;
}

BaseStructure read_base(const Node& n) {
  if (has_tag(n, "dlist")) return read_list(n);
  return read_tree(n);
}

Hierarchical read_hier(const Node& n) {
  expect_tag(n, "hier", 2);
  Hierarchical h;
  h.classes = read_base(expect_tag(n.items[1], "classes", 2).items[1]);
  for (std::size_t i = 2; i < n.items.size(); ++i) {
    const auto& c = expect_tag(n.items[i], "class", 3);
    h.per_class[read_string(c.items[1])] = read_base(c.items[2]);
  }
  return h;
}

Hybrid read_hybrid(const Node& n) {
  expect_tag(n, "hybrid", 2);
  Hybrid h;
  h.fallback = read_string(expect_tag(n.items[1], "fallback", 2).items[1]);
  for (std::size_t i = 2; i < n.items.size(); ++i) {
    const auto& g = n.items[i];
    if (has_tag(g, "default")) {
      if (i + 1 != n.items.size()) bad("default must come last", &g);
      h.default_body = read_hier(g.items.at(1));
      continue;
    }
    expect_tag(g, "group", 5);
    HybridGroup group;
    if (!g.items[1].is_symbol()) bad("group name", &g);
    group.spec.name = g.items[1].text;
    const auto& pats = expect_tag(g.items[2], "patterns", 2);
    for (std::size_t k = 1; k < pats.items.size(); ++k) {
      if (!pats.items[k].is_list()) bad("pattern must be a list", &pats.items[k]);
      group.spec.patterns.push_back(ActionPattern{pats.items[k]});
    }
    group.gate = read_tree(expect_tag(g.items[3], "gate", 2).items[1]);
    group.body = read_hier(expect_tag(g.items[4], "body", 2).items[1]);
    h.groups.push_back(std::move(group));
  }
  return h;
}

// Breaks long lists over lines so model files stay diffable.
void pretty(const Node& n, int indent, std::string& out) {
  std::string flat = sexpr::write(n);
  if (!n.is_list() || flat.size() + indent <= 100 || n.items.empty()) {
    out += flat;
    return;
  }
  out += "(" + sexpr::write(n.items[0]);
  std::size_t i = 1;
  // Atoms following the tag stay on the tag line.
  for (; i < n.items.size() && n.items[i].is_atom(); ++i) out += " " + sexpr::write(n.items[i]);
  for (; i < n.items.size(); ++i) {
    out += "\n" + std::string(indent + 2, ' ');
    pretty(n.items[i], indent + 2, out);
  }
  out += ")";
}

std::string format_double(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

double read_double(const Node& n) {
  if (!n.is_symbol()) bad("expected number", &n);
  try {
    std::size_t used = 0;
    double d = std::stod(n.text, &used);
    if (used != n.text.size()) bad("expected number", &n);
    return d;
  } catch (const std::logic_error&) {
    bad("expected number", &n);
  }
}

}  // namespace

double entropy(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw Error(ErrorCode::Empty, "entropy of an empty distribution");
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double info_gain(const std::vector<ParseExample>& examples, std::size_t feature) {
  if (examples.empty()) throw Error(ErrorCode::Empty, "info_gain over no examples");
  Indices idx = all_indices(examples.size());
  return gain_of(examples, idx, entropy_of(label_counts(examples, idx)), partition(examples, idx, feature));
}

DecisionTree train_id3(const std::vector<ParseExample>& examples) {
  if (examples.empty()) throw Error(ErrorCode::Empty, "no training examples");
  return grow(examples, all_indices(examples.size()), feature_count(examples));
}

DecisionList train_dlist(const std::vector<ParseExample>& examples) {
  if (examples.empty()) throw Error(ErrorCode::Empty, "no training examples");
  return grow_list(examples, all_indices(examples.size()));
}

Hierarchical train_hier(const std::vector<ParseExample>& examples, bool lists) {
  if (examples.empty()) throw Error(ErrorCode::Empty, "no training examples");
  std::vector<ParseExample> by_class = examples;
  std::map<std::string, Indices> members;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    by_class[i].action = action_class(examples[i].action);
    members[by_class[i].action].push_back(i);
  }
  Hierarchical h;
  h.classes = train_base(by_class, lists);
  for (const auto& [cls, idx] : members) h.per_class.emplace(cls, train_base(subset(examples, idx), lists));
  return h;
}

Hybrid train_hybrid(const std::vector<ParseExample>& examples, const std::vector<GroupSpec>& groups,
                    std::vector<std::string>* warnings) {
  if (examples.empty()) throw Error(ErrorCode::Empty, "no training examples");
  Hybrid h;
  h.fallback = majority(label_counts(examples, all_indices(examples.size())));
  Indices unclaimed = all_indices(examples.size());
  for (const auto& spec : groups) {
    Indices positives, rest;
    std::vector<ParseExample> gate_examples;
    for (auto i : unclaimed) {
      bool in = spec.matches(examples[i].action);
      (in ? positives : rest).push_back(i);
      gate_examples.push_back(ParseExample{examples[i].values, std::string(in ? kTrue : kFalse), 0, 0});
    }
    if (positives.empty()) {
      if (warnings) warnings->push_back("EMPTY_GROUP " + spec.name);
      continue;
    }
    h.groups.push_back(HybridGroup{spec, train_id3(gate_examples), train_hier(subset(examples, positives), false)});
    unclaimed = std::move(rest);
  }
  if (!unclaimed.empty()) h.default_body = train_hier(subset(examples, unclaimed), false);
  return h;
}

ActionPattern ActionPattern::parse(std::string_view text) {
  Node n;
  try {
    n = sexpr::parse_one(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedStructure, e.detail());
  }
  if (!n.is_list()) throw Error(ErrorCode::MalformedStructure, "action pattern must be a list");
  return ActionPattern{std::move(n)};
}

bool ActionPattern::matches(std::string_view canonical_action) const {
  Node target;
  try {
    target = sexpr::parse_one(canonical_action);
  } catch (const Error&) {
    return false;
  }
  return match_node(pattern, target);
}

std::string ActionPattern::text() const { return sexpr::write(pattern); }

bool GroupSpec::matches(std::string_view canonical_action) const {
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const ActionPattern& p) { return p.matches(canonical_action); });
}

std::vector<GroupSpec> parse_group_config(std::string_view text) {
  std::vector<Node> top;
  try {
    top = sexpr::parse_all(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedStructure, e.detail(), e.line());
  }
  std::vector<GroupSpec> out;
  std::set<std::string> names;
  bool seen_default = false;
  for (const auto& n : top) {
    if (seen_default) bad("nothing may follow (default)", &n);
    if (has_tag(n, "default")) {
      if (n.items.size() != 1) bad("(default) takes no arguments", &n);
      seen_default = true;
      continue;
    }
    expect_tag(n, "group", 3);
    if (!n.items[1].is_symbol()) bad("group name must be a symbol", &n);
    GroupSpec g;
    g.name = sexpr::upper(n.items[1].text);
    if (!names.insert(g.name).second) bad("duplicate group " + g.name, &n);
    for (std::size_t i = 2; i < n.items.size(); ++i) {
      if (!n.items[i].is_list()) bad("pattern must be a list", &n.items[i]);
      g.patterns.push_back(ActionPattern{n.items[i]});
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Tree: return "tree";
    case Variant::List: return "list";
    case Variant::Hier: return "hier";
    case Variant::Hybrid: return "hybrid";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  for (Variant v : {Variant::Tree, Variant::List, Variant::Hier, Variant::Hybrid})
    if (sexpr::iequals(text, to_string(v))) return v;
  throw Error(ErrorCode::ConfigError, "unknown variant " + std::string(text) + " (tree|list|hier|hybrid)");
}

Classification classify(const Structure& s, const std::vector<FeatureValue>& values) {
  Classification out;
  struct V {
    const std::vector<FeatureValue>& values;
    Classification& out;
    void operator()(const DecisionTree& t) const { walk_tree(t, values, "tree", out); }
    void operator()(const DecisionList& l) const { walk_list(l, values, "list", out); }
    void operator()(const Hierarchical& h) const { walk_hier(h, values, "", out); }
    void operator()(const Hybrid& h) const {
      for (const auto& g : h.groups) {
        walk_tree(g.gate, values, "gate " + g.spec.name, out);
        if (out.action == kTrue) {
          walk_hier(g.body, values, g.spec.name + " ", out);
          return;
        }
      }
      if (h.default_body) {
        walk_hier(*h.default_body, values, "default ", out);
      } else {
        out.trace.push_back(Decision{"fallback", std::nullopt, {}, {}, true});
        out.action = h.fallback;
      }
    }
  };
  std::visit(V{values, out}, s);
  return out;
}

std::string classify_action(const Structure& s, const std::vector<FeatureValue>& values) {
  return classify(s, values).action;
}

TrainStats structure_stats(const Structure& s, const std::vector<ParseExample>& examples) {
  TrainStats st;
  Size size = structure_size(s);
  st.example_count = examples.size();
  st.node_count = size.nodes;
  st.depth = size.depth;
  std::size_t hits = 0;
  for (const auto& e : examples) hits += classify_action(s, e.values) == e.action;
  st.training_accuracy = examples.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(examples.size());
  st.conflicts = find_conflicts(examples);
  return st;
}

Model train_model(Variant variant, const FeatureSet& features, const std::vector<ParseExample>& examples,
                  const std::vector<GroupSpec>& groups, std::vector<std::string>* warnings) {
  Model m;
  m.variant = variant;
  m.features = features.texts();
  switch (variant) {
    case Variant::Tree: m.structure = train_id3(examples); break;
    case Variant::List: m.structure = train_dlist(examples); break;
    case Variant::Hier: m.structure = train_hier(examples, true); break;
    case Variant::Hybrid: m.structure = train_hybrid(examples, groups, warnings); break;
  }
  m.stats = structure_stats(m.structure, examples);
  return m;
}

sexpr::Node structure_to_sexpr(const Structure& s) {
  struct V {
    Node operator()(const DecisionTree& t) const { return tree_node(t); }
    Node operator()(const DecisionList& l) const { return list_node(l); }
    Node operator()(const Hierarchical& h) const { return hier_node(h); }
    Node operator()(const Hybrid& h) const { return hybrid_node(h); }
  };
  return std::visit(V{}, s);
}

Structure structure_from_sexpr(const sexpr::Node& n) {
  if (has_tag(n, "leaf") || has_tag(n, "node")) return read_tree(n);
  if (has_tag(n, "dlist")) return read_list(n);
  if (has_tag(n, "hier")) return read_hier(n);
  if (has_tag(n, "hybrid")) return read_hybrid(n);
  bad("unknown structure", &n);
}

std::string save_model(const Model& m) {
  std::vector<Node> feats;
  for (const auto& f : m.features) feats.push_back(str(f));
  std::vector<Node> conflicts;
  for (const auto& [a, b] : m.stats.conflicts) conflicts.push_back(Node::list({num(a), num(b)}));
  Node stats = tagged("stats", {tagged("examples", {num(m.stats.example_count)}),
                                tagged("nodes", {num(m.stats.node_count)}), tagged("depth", {num(m.stats.depth)}),
                                tagged("accuracy", {sym(format_double(m.stats.training_accuracy))}),
                                tagged("conflicts", std::move(conflicts))});
  Node model = tagged("model", {tagged("variant", {sym(std::string(to_string(m.variant)))}),
                                tagged("features", std::move(feats)), std::move(stats),
                                tagged("structure", {structure_to_sexpr(m.structure)})});
  std::string out;
  pretty(model, 0, out);
  return out + "\n";
}

Model load_model(std::string_view text) {
  std::vector<Node> top;
  try {
    top = sexpr::parse_all(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedStructure, e.detail(), e.line());
  }
  if (top.size() != 1) bad("expected exactly one (model ...) form");
  const Node& n = expect_tag(top[0], "model", 5);
  Model m;
  try {
    const auto& variant = expect_tag(n.items[1], "variant", 2);
    m.variant = parse_variant(variant.items[1].text);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedStructure) throw;
    bad(e.detail(), &n.items[1]);
  }
  const auto& feats = expect_tag(n.items[2], "features", 1);
  for (std::size_t i = 1; i < feats.items.size(); ++i) m.features.push_back(read_string(feats.items[i]));
  const auto& stats = expect_tag(n.items[3], "stats", 6);
  m.stats.example_count = read_count(expect_tag(stats.items[1], "examples", 2).items[1]);
  m.stats.node_count = read_count(expect_tag(stats.items[2], "nodes", 2).items[1]);
  m.stats.depth = read_count(expect_tag(stats.items[3], "depth", 2).items[1]);
  m.stats.training_accuracy = read_double(expect_tag(stats.items[4], "accuracy", 2).items[1]);
  const auto& conflicts = expect_tag(stats.items[5], "conflicts", 1);
  for (std::size_t i = 1; i < conflicts.items.size(); ++i) {
    const auto& c = conflicts.items[i];
    if (!c.is_list() || c.items.size() != 2) bad("bad conflict pair", &c);
    m.stats.conflicts.emplace_back(read_count(c.items[0]), read_count(c.items[1]));
  }
  m.structure = structure_from_sexpr(expect_tag(n.items[4], "structure", 2).items[1]);
  return m;
}

Model load_model_file(const std::filesystem::path& path) { return load_model(read_file(path)); }

}  // namespace frameparse
