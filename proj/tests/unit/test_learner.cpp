#include "doctest.h"

#include "support.hpp"

#include "frameparse/error.hpp"

using namespace frameparse;

namespace {

ParseExample ex(std::vector<std::string> values, std::string action) {
  return ParseExample{std::move(values), std::move(action), 0, 0};
}

std::string text_of(const Structure& s) { return sexpr::write(structure_to_sexpr(s)); }

std::size_t correct(const Structure& s, const std::vector<ParseExample>& xs) {
  std::size_t n = 0;
  for (const auto& e : xs) n += classify_action(s, e.values) == e.action;
  return n;
}

}  // namespace

TEST_CASE("entropy reference values") {
  CHECK(entropy({3, 1}) == doctest::Approx(0.8112781244591328).epsilon(1e-15));
  CHECK(entropy({2, 2}) == doctest::Approx(1.0));
  CHECK(entropy({4, 0}) == 0.0);
  CHECK(entropy({1, 1, 1, 1}) == doctest::Approx(2.0));
  CHECK(entropy({5}) == 0.0);
  try {
    entropy({0, 0});
    FAIL("entropy of nothing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Empty);
  }
  CHECK_THROWS_AS(entropy({}), Error);
}

TEST_CASE("entropy and gain match the oracle and stay within bounds") {
  std::mt19937 rng(21);
  for (int round = 0; round < 500; ++round) {
    auto xs = support::random_examples(rng, 12, 4);
    std::map<std::string, std::size_t> labels;
    for (const auto& e : xs) ++labels[e.action];
    std::vector<std::size_t> counts;
    for (const auto& [_, n] : labels) counts.push_back(n);
    double h = entropy(counts);
    CHECK(std::abs(h - support::oracle_entropy(counts)) < 1e-9);
    CHECK(h <= std::log2(static_cast<double>(counts.size())) + 1e-12);
    for (std::size_t f = 0; f < xs[0].values.size(); ++f) {
      double g = info_gain(xs, f);
      CHECK(std::abs(g - support::oracle_info_gain(xs, f)) < 1e-9);
      CHECK(g >= -1e-12);
      CHECK(g <= h + 1e-12);
    }
  }
}

TEST_CASE("a perfectly predictive feature gives a one-split tree") {
  std::vector<ParseExample> xs{ex({"a", "x"}, "(S)"), ex({"a", "y"}, "(S)"), ex({"b", "x"}, "(DONE)"),
                               ex({"b", "y"}, "(DONE)")};
  DecisionTree t = train_id3(xs);
  REQUIRE(t.feature == 0u);
  REQUIRE(t.branches.size() == 2);
  CHECK(t.branches[0].value == "a");
  CHECK(t.branches[0].subtree.is_leaf());
  CHECK(t.branches[1].subtree.action == "(DONE)");
  CHECK(info_gain(xs, 0) == doctest::Approx(1.0));
  CHECK(info_gain(xs, 1) == doctest::Approx(0.0));
}

TEST_CASE("ties break to the lowest feature and the smallest action") {
  std::vector<ParseExample> xs{ex({"a", "a"}, "(S)"), ex({"b", "b"}, "(DONE)")};
  CHECK(train_id3(xs).feature == 0u);
  std::vector<ParseExample> conflict{ex({"a"}, "(S)"), ex({"a"}, "(DONE)")};
  DecisionTree leaf = train_id3(conflict);
  CHECK(leaf.is_leaf());
  CHECK(leaf.action == "(DONE)");
  CHECK(leaf.distribution.size() == 2);
}

TEST_CASE("zero-gain splits are still taken while impure") {
  // XOR: neither feature alone has gain, both together separate the labels.
  std::vector<ParseExample> xs{ex({"0", "0"}, "(S)"), ex({"0", "1"}, "(DONE)"), ex({"1", "0"}, "(DONE)"),
                               ex({"1", "1"}, "(S)")};
  DecisionTree t = train_id3(xs);
  CHECK(correct(t, xs) == xs.size());
  CHECK(structure_stats(t, xs).depth == 2);
}

TEST_CASE("unseen values follow the largest branch") {
  std::vector<ParseExample> xs{ex({"a"}, "(S)"), ex({"a"}, "(S)"), ex({"b"}, "(DONE)")};
  DecisionTree t = train_id3(xs);
  CHECK(t.default_value == "a");
  Classification c = classify(t, {"zzz"});
  CHECK(c.action == "(S)");
  REQUIRE(c.trace.size() == 1);
  CHECK(c.trace[0].used_default);
  CHECK(c.trace[0].taken == "a");
  CHECK(classify_action(t, {}) == "(S)");
}

TEST_CASE("every learner is consistent with conflict-free data") {
  std::mt19937 rng(33);
  std::vector<GroupSpec> groups = parse_group_config("(group DONEG (DONE)) (group A2 (A2)) (default)");
  for (int round = 0; round < 300; ++round) {
    auto xs = support::conflict_free(support::random_examples(rng, 20, 5, 3, 4));
    for (auto& e : xs)
      if (e.action == "(A1)") e.action = "(DONE)";
    CHECK(correct(train_id3(xs), xs) == xs.size());
    CHECK(correct(train_dlist(xs), xs) == xs.size());
    CHECK(correct(train_hier(xs, false), xs) == xs.size());
    CHECK(correct(train_hier(xs, true), xs) == xs.size());
    CHECK(correct(train_hybrid(xs, groups), xs) == xs.size());
  }
}

TEST_CASE("ID3 output does not depend on example order") {
  std::mt19937 rng(44);
  for (int round = 0; round < 100; ++round) {
    auto xs = support::random_examples(rng, 15, 4);
    std::string reference = text_of(train_id3(xs));
    for (int k = 0; k < 5; ++k) {
      std::shuffle(xs.begin(), xs.end(), rng);
      CHECK(text_of(train_id3(xs)) == reference);
    }
  }
}

TEST_CASE("decision lists stop on a pure default residue and test every rule") {
  std::vector<ParseExample> xs{ex({"a"}, "(DONE)"), ex({"b"}, "(S)"), ex({"c"}, "(S)")};
  DecisionList l = train_dlist(xs);
  CHECK(l.default_action == "(S)");
  REQUIRE(l.rules.size() == 1);
  CHECK(l.rules[0].action == "(DONE)");
  CHECK(l.rules[0].tests == std::vector<std::pair<std::size_t, FeatureValue>>{{0, "a"}});

  // Pure subsets are preferred, then larger ones, then scan order.
  std::vector<ParseExample> ys{ex({"a", "x"}, "(S)"), ex({"a", "y"}, "(S)"), ex({"b", "x"}, "(S)"),
                               ex({"b", "y"}, "(DONE)")};
  DecisionList m = train_dlist(ys);
  REQUIRE(m.rules.size() == 3);
  CHECK(m.rules[0].tests == std::vector<std::pair<std::size_t, FeatureValue>>{{0, "a"}});
  CHECK(m.rules[0].support == 2);
  CHECK(m.rules[2].action == "(DONE)");
  for (const auto& r : m.rules) CHECK_FALSE(r.tests.empty());
  CHECK(correct(m, ys) == ys.size());

  DecisionList one = train_dlist({ex({"a"}, "(S)")});
  CHECK(one.rules.empty());
  CHECK(one.default_action == "(S)");
}

TEST_CASE("hierarchical structures classify by action class first") {
  std::vector<ParseExample> xs{ex({"a"}, "(S)"), ex({"b"}, "(R 1 TO NP AS PRED)"), ex({"c"}, "(R 2 TO VP AS PRED OBJ)"),
                               ex({"d"}, "(DONE)")};
  Hierarchical h = train_hier(xs, false);
  CHECK(h.per_class.size() == 3);
  CHECK(h.per_class.count("R"));
  Classification c = classify(h, {"c"});
  CHECK(c.action == "(R 2 TO VP AS PRED OBJ)");
  REQUIRE(c.trace.size() >= 2);
  CHECK(c.trace.front().stage == "class");
  CHECK(c.trace.back().stage == "R");
}

TEST_CASE("group patterns") {
  auto groups = parse_group_config("(group EMPTY (E *)) (group ADDINTO (A *) (a -1 * AS MOD)) (default)");
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].matches("(E PRO SUBJ OF -2)"));
  CHECK_FALSE(groups[0].matches("(S)"));
  CHECK(groups[1].matches("(A -1 INTO OBJ OF -2 AS MOD)"));
  CHECK(ActionPattern::parse("(a -1 * AS MOD)").matches("(A -1 INTO OBJ OF -2 AS MOD)"));
  CHECK_FALSE(ActionPattern::parse("(A -1 * AS MOD)").matches("(A -2 INTO -1 AS MOD)"));
  CHECK(ActionPattern::parse("(R * (OBJ *) *)").matches("(R 2 TO VP AS PRED (OBJ THEME))"));
  CHECK(ActionPattern::parse("(*)").matches("(DONE)"));
  CHECK_FALSE(ActionPattern::parse("(S)").matches("(S NOUN)"));
  for (const char* bad : {"(group)", "(group X)", "(grp X (A *))", "(group X A)", "(default) (default)"})
    CHECK_THROWS_AS(parse_group_config(bad), Error);
}

TEST_CASE("hybrid gates claim their groups in order") {
  std::vector<ParseExample> xs{ex({"e", "1"}, "(E PRO -1)"), ex({"s", "1"}, "(S)"), ex({"s", "2"}, "(S)"),
                               ex({"d", "2"}, "(DONE)")};
  std::vector<std::string> warnings;
  auto groups = parse_group_config("(group EMPTY (E *)) (group MARK (M *)) (default)");
  Hybrid h = train_hybrid(xs, groups, &warnings);
  CHECK(warnings == std::vector<std::string>{"EMPTY_GROUP MARK"});
  REQUIRE(h.groups.size() == 1);
  CHECK(h.groups[0].spec.name == "EMPTY");
  REQUIRE(h.default_body);
  CHECK(h.fallback == "(S)");
  CHECK(correct(h, xs) == xs.size());
  Classification c = classify(h, {"e", "1"});
  CHECK(c.trace.front().stage == "gate EMPTY");
  // Everything claimed: no default body, and the single gate always fires.
  Hybrid all = train_hybrid({ex({"e"}, "(E PRO -1)")}, groups);
  CHECK_FALSE(all.default_body);
  CHECK(classify_action(all, {"zzz"}) == "(E PRO -1)");
}

TEST_CASE("model files round trip and classify identically") {
  std::mt19937 rng(55);
  auto groups = parse_group_config("(group DONEG (DONE)) (group A2 (A2)) (default)");
  FeatureSet fs = FeatureSet::parse("(SYNT OF -1)\n(SYNT OF -2)\n(SYNT OF 1)\n(SYNT OF 2)\n(LEX OF -1)\n");
  for (int round = 0; round < 40; ++round) {
    auto xs = support::random_examples(rng, 25, 5, 4, 4);
    for (auto& e : xs) e.values.resize(5, "v0");
    for (Variant v : {Variant::Tree, Variant::List, Variant::Hier, Variant::Hybrid}) {
      Model m = train_model(v, fs, xs, groups);
      std::string text = save_model(m);
      Model back = load_model(text);
      CHECK(save_model(back) == text);
      CHECK(back.variant == v);
      CHECK(back.features == fs.texts());
      CHECK(back.stats.node_count == m.stats.node_count);
      CHECK(back.stats.training_accuracy == m.stats.training_accuracy);
      for (int q = 0; q < 50; ++q) {
        std::vector<FeatureValue> query;
        for (int f = 0; f < 5; ++f) query.push_back("v" + std::to_string(rng() % 5));
        CHECK(classify_action(back.structure, query) == classify_action(m.structure, query));
      }
    }
  }
}

TEST_CASE("malformed model files") {
  for (const char* bad : {"", "(model)", "(model (variant tree))", "(model (variant bogus) (features) (structure (leaf \"a\" 1 (dist))))",
                          "(model (variant tree) (features) (stats (examples 1) (nodes 1) (depth 0) (accuracy 1) (conflicts)) (structure (leaf \"a\" 0 (dist))))",
                          "(model (variant tree) (features) (stats (examples 1) (nodes 1) (depth 0) (accuracy 1) (conflicts)) (structure (node 0 \"x\" \"a\" 1 (dist))))",
                          "(model (variant tree) (features"}) {
    try {
      load_model(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK((e.code() == ErrorCode::MalformedStructure || e.code() == ErrorCode::ConfigError));
    }
  }
}

TEST_CASE("training stats on the bundled corpus") {
  const auto& t = support::toy();
  auto xs = extract_examples(t.corpus, t.features, t.bundle);
  for (Variant v : {Variant::Tree, Variant::List, Variant::Hier, Variant::Hybrid}) {
    Model m = train_model(v, t.features, xs, t.groups);
    CHECK(m.stats.example_count == xs.size());
    CHECK(m.stats.training_accuracy == 1.0);
    CHECK(m.stats.conflicts.empty());
    CHECK(m.stats.node_count > 0);
  }
  CHECK(parse_variant("HYBRID") == Variant::Hybrid);
  CHECK(to_string(Variant::Hier) == "hier");
  CHECK_THROWS_AS(parse_variant("forest"), Error);
}
