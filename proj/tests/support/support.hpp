#pragma once

// Shared fixtures for the unit and acceptance tests: bundled data paths,
// random generators and oracles written independently of the library code.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "frameparse/action.hpp"
#include "frameparse/evaluator.hpp"
#include "frameparse/feature.hpp"
#include "frameparse/frame.hpp"
#include "frameparse/learner.hpp"
#include "frameparse/project.hpp"
#include "frameparse/resources.hpp"

namespace support {

namespace fs = std::filesystem;
using namespace frameparse;

inline fs::path data_dir() { return FRAMEPARSE_DATA_DIR; }
inline fs::path project_file() { return data_dir() / "project.sexp"; }
inline fs::path cli_path() { return FRAMEPARSE_CLI; }

struct Toy {
  Project project;
  ResourceBundle bundle;
  FeatureSet features;
  std::vector<GroupSpec> groups;
  std::vector<ActionLog> corpus;
};

inline const Toy& toy() {
  static const Toy t = [] {
    Toy t{Project::load(project_file()), {}, {}, {}, {}};
    t.bundle = t.project.load_bundle();
    t.features = t.project.load_features();
    t.groups = t.project.load_groups();
    t.corpus = t.project.load_corpus();
    return t;
  }();
  return t;
}

inline fs::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng{std::random_device{}()};
  fs::path p = fs::temp_directory_path() / ("frameparse_" + tag + "_" + std::to_string(rng()));
  fs::create_directories(p);
  return p;
}

// Random well-formed tree over tokens [start, end). Leaves are single tokens;
// a trailing single-token child is sometimes tagged DUMMY.
inline Frame random_tree(std::mt19937& rng, int start, int end, int depth = 0) {
  static const char* kLeafCats[] = {"S-NOUN", "S-VERB", "S-DET", "S-ADJ", "S-ADV", "D-PERIOD"};
  static const char* kPhraseCats[] = {"S-NP", "S-VP", "S-PP", "S-SNT"};
  static const char* kRoles[] = {"MOD", "OBJ", "SUBJ", "TIME", "DET"};
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  if (end - start == 1 && (depth > 0 && pick(3) != 0)) {
    Frame leaf;
    leaf.surface = "w" + std::to_string(start);
    leaf.lex = leaf.surface;
    leaf.synt = Concept(kLeafCats[pick(6)]);
    leaf.span = Span{start, end};
    return leaf;
  }
  if (end - start == 1 && depth > 3) return random_tree(rng, start, end, 1);
  Frame f;
  f.synt = Concept(kPhraseCats[pick(4)]);
  std::vector<int> cuts{start, end};
  int extra = std::min(end - start - 1, pick(3));
  std::set<int> inner;
  while (static_cast<int>(inner.size()) < extra) inner.insert(start + 1 + pick(end - start - 1));
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  std::sort(cuts.begin(), cuts.end());
  int pred = pick(static_cast<int>(cuts.size()) - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Frame child = random_tree(rng, cuts[i], cuts[i + 1], depth + 1);
    RoleList roles{static_cast<int>(i) == pred ? "PRED" : kRoles[pick(5)]};
    if (static_cast<int>(i) != pred && child.is_leaf() && pick(4) == 0) roles = {"DUMMY"};
    f.subs.push_back(Subframe{roles, std::move(child)});
  }
  const Frame* head = f.child_with_role("PRED");
  f.lex = head->lex;
  refresh_derived(f);
  return f;
}

// Random tree with an occasional span-less empty category and forms/extras,
// for text round trips.
inline Frame decorate(std::mt19937& rng, Frame f) {
  auto coin = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng) == 0; };
  if (coin(3)) f.sem = Concept("I-EN-THING" + std::to_string(rng() % 5));
  if (coin(3)) f.forms.person = 1 + static_cast<int>(rng() % 3);
  if (coin(3)) f.forms.number = coin(2) ? Number::Sing : Number::Plur;
  if (coin(4)) f.forms.tense = "past_tense";
  if (coin(5)) f.extras["NOTE"] = "x \"quoted\" y";
  if (coin(4) && !f.is_leaf()) f.lex = "lex" + std::to_string(rng() % 7);
  for (auto& s : f.subs) s.child = decorate(rng, std::move(s.child));
  return f;
}

// --- learner oracles ---

inline double oracle_entropy(const std::vector<std::size_t>& counts) {
  long double n = 0;
  for (auto c : counts) n += c;
  long double sum = 0;
  for (auto c : counts)
    if (c) sum += static_cast<long double>(c) * std::log(static_cast<long double>(c));
  return static_cast<double>((std::log(n) - sum / n) / std::log(2.0L));
}

// Recomputes the gain by enumerating distinct values and counting labels with
// nested scans, without any shared partition code.
inline double oracle_info_gain(const std::vector<ParseExample>& ex, std::size_t feature) {
  std::vector<std::string> labels, values;
  for (const auto& e : ex) {
    if (std::find(labels.begin(), labels.end(), e.action) == labels.end()) labels.push_back(e.action);
    if (std::find(values.begin(), values.end(), e.values[feature]) == values.end()) values.push_back(e.values[feature]);
  }
  auto counts_where = [&](const std::string* value) {
    std::vector<std::size_t> c;
    for (const auto& l : labels) {
      std::size_t n = 0;
      for (const auto& e : ex) n += e.action == l && (!value || e.values[feature] == *value);
      c.push_back(n);
    }
    return c;
  };
  long double total = oracle_entropy(counts_where(nullptr));
  for (const auto& v : values) {
    auto c = counts_where(&v);
    std::size_t size = 0;
    for (auto x : c) size += x;
    total -= static_cast<long double>(size) / ex.size() * oracle_entropy(c);
  }
  return static_cast<double>(total);
}

inline std::vector<ParseExample> random_examples(std::mt19937& rng, std::size_t max_examples,
                                                 std::size_t max_features, std::size_t max_values = 3,
                                                 std::size_t max_labels = 3) {
  auto upto = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(1, n)(rng); };
  std::size_t n = upto(max_examples), f = upto(max_features);
  std::size_t nv = upto(max_values), nl = upto(max_labels);
  std::vector<ParseExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    ParseExample e;
    for (std::size_t k = 0; k < f; ++k) {
      std::size_t v = upto(nv) - 1;
      e.values.push_back(v == 0 && rng() % 4 == 0 ? std::string(kUnavailable) : "v" + std::to_string(v));
    }
    e.action = "(A" + std::to_string(upto(nl)) + ")";
    out.push_back(std::move(e));
  }
  return out;
}

// Drops later examples whose vector repeats an earlier one with another label.
inline std::vector<ParseExample> conflict_free(std::vector<ParseExample> ex) {
  std::map<std::vector<FeatureValue>, std::string> seen;
  std::vector<ParseExample> out;
  for (auto& e : ex) {
    auto [it, fresh] = seen.emplace(e.values, e.action);
    if (fresh || it->second == e.action) out.push_back(std::move(e));
  }
  return out;
}

// --- bracket oracle ---

struct OracleBracket {
  int start, end;
  std::string label;
};

// Token sets per frame, skipping DUMMY subtrees; brackets for non-leaves.
inline std::set<int> oracle_tokens(const Frame& f, std::vector<OracleBracket>& out) {
  std::set<int> toks;
  if (f.is_leaf()) {
    if (f.span)
      for (int t = f.span->start; t < f.span->end; ++t) toks.insert(t);
    return toks;
  }
  for (const auto& s : f.subs) {
    if (s.roles == RoleList{"DUMMY"}) continue;
    auto c = oracle_tokens(s.child, out);
    toks.insert(c.begin(), c.end());
  }
  if (!toks.empty()) out.push_back({*toks.begin(), *toks.rbegin() + 1, f.synt.name()});
  return toks;
}

inline std::vector<OracleBracket> oracle_brackets(const Frame& f) {
  std::vector<OracleBracket> out;
  oracle_tokens(f, out);
  return out;
}

inline void oracle_tags(const Frame& f, std::map<int, std::string>& out) {
  if (f.is_leaf()) {
    if (f.span)
      for (int t = f.span->start; t < f.span->end; ++t) out[t] = f.synt.name();
    return;
  }
  for (const auto& s : f.subs) oracle_tags(s.child, out);
}

// Greedy one-to-one matching; exact for equality-based matches.
inline std::size_t oracle_matches(const std::vector<OracleBracket>& sys, const std::vector<OracleBracket>& gold,
                                  bool labeled) {
  std::vector<bool> used(gold.size(), false);
  std::size_t n = 0;
  for (const auto& s : sys) {
    for (std::size_t j = 0; j < gold.size(); ++j) {
      if (used[j] || s.start != gold[j].start || s.end != gold[j].end) continue;
      if (labeled && s.label != gold[j].label) continue;
      used[j] = true;
      ++n;
      break;
    }
  }
  return n;
}

inline std::size_t oracle_crossings(const std::vector<OracleBracket>& sys, const std::vector<OracleBracket>& gold) {
  std::size_t n = 0;
  for (const auto& s : sys) {
    bool crossing = false;
    for (const auto& g : gold) {
      std::set<int> a, b;
      for (int t = s.start; t < s.end; ++t) a.insert(t);
      for (int t = g.start; t < g.end; ++t) b.insert(t);
      std::vector<int> both;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
      bool a_in_b = std::includes(b.begin(), b.end(), a.begin(), a.end());
      bool b_in_a = std::includes(a.begin(), a.end(), b.begin(), b.end());
      if (!both.empty() && !a_in_b && !b_in_a) crossing = true;
    }
    n += crossing;
  }
  return n;
}

inline PairCounts oracle_score(const Frame& sys, const Frame& gold) {
  auto sb = oracle_brackets(sys), gb = oracle_brackets(gold);
  std::map<int, std::string> st, gt;
  oracle_tags(sys, st);
  oracle_tags(gold, gt);
  PairCounts c;
  c.system = sb.size();
  c.gold = gb.size();
  c.matched = oracle_matches(sb, gb, false);
  c.labeled = oracle_matches(sb, gb, true);
  c.crossings = oracle_crossings(sb, gb);
  c.words = gt.size();
  for (const auto& [t, l] : gt) c.tags_correct += st[t] == l;
  return c;
}

// A model that never finishes: S-BACK whenever the stack is non-empty, S
// otherwise. Feature 0 must be (EXISTS -1).
inline Structure cyclic_structure() {
  DecisionTree t;
  t.feature = 0;
  t.action = "(S)";
  t.support = 2;
  t.distribution = {{"(S)", 1}, {"(S-BACK)", 1}};
  t.default_value = "UNAVAILABLE";
  DecisionTree back;
  back.action = "(S-BACK)";
  back.support = 1;
  back.distribution = {{"(S-BACK)", 1}};
  DecisionTree shift;
  shift.action = "(S)";
  shift.support = 1;
  shift.distribution = {{"(S)", 1}};
  t.branches = {TreeBranch{"TRUE", back}, TreeBranch{"UNAVAILABLE", shift}};
  return t;
}

}  // namespace support
