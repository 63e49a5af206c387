#include "doctest.h"

#include "support.hpp"

#include "frameparse/error.hpp"

using namespace frameparse;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("isa agrees with a breadth-first oracle on random DAGs") {
  std::mt19937 rng(5);
  for (int round = 0; round < 60; ++round) {
    int n = 2 + static_cast<int>(rng() % 12);
    std::vector<Concept> cs;
    for (int i = 0; i < n; ++i) cs.emplace_back("C-N" + std::to_string(i));
    std::vector<std::pair<Concept, Concept>> links;
    std::vector<std::vector<int>> up(n);
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (rng() % 3 == 0) {
          links.emplace_back(cs[i], cs[j]);
          up[i].push_back(j);
        }
    ConceptGraph g(cs, links);
    for (int a = 0; a < n; ++a) {
      std::vector<bool> reach(n, false);
      std::vector<int> queue{a};
      reach[a] = true;
      while (!queue.empty()) {
        int x = queue.back();
        queue.pop_back();
        for (int p : up[x])
          if (!reach[p]) {
            reach[p] = true;
            queue.push_back(p);
          }
      }
      for (int b = 0; b < n; ++b) CHECK(g.isa(cs[a], cs[b]) == reach[b]);
    }
  }
}

TEST_CASE("cycles and unknown endpoints are rejected") {
  std::vector<Concept> cs{Concept("C-A"), Concept("C-B"), Concept("C-C")};
  CHECK(code_of([&] {
          ConceptGraph({cs}, {{cs[0], cs[1]}, {cs[1], cs[2]}, {cs[2], cs[0]}});
        }) == ErrorCode::Cycle);
  CHECK(code_of([&] { ConceptGraph({cs}, {{cs[0], Concept("C-Z")}}); }) == ErrorCode::UnknownConcept);
  ConceptGraph g(cs, {{cs[0], cs[1]}});
  CHECK(code_of([&] { g.isa(Concept("C-Z"), cs[0]); }) == ErrorCode::UnknownConcept);
}

TEST_CASE("generalize climbs to the child of the requested level") {
  const auto& kb = support::toy().bundle.kb;
  CHECK(kb.generalize(Concept("S-NP"), Concept("S-SYNT-ELEM")) == Concept("S-NP"));
  CHECK(kb.generalize(Concept("S-TR-VERB"), Concept("S-SYNT-ELEM")).value().name() != "S-TR-VERB");
  CHECK(kb.isa(Concept("S-TR-VERB"), *kb.generalize(Concept("S-TR-VERB"), Concept("S-SYNT-ELEM"))));
  CHECK_FALSE(kb.generalize(Concept("S-SYNT-ELEM"), Concept("S-NP")).has_value());
  CHECK(kb.isa(Concept("I-EN-JOHN"), Concept("C-PERSON")));
  CHECK(kb.isa(Concept("C-PERSON"), Concept("C-THING")));
  CHECK_FALSE(kb.isa(Concept("C-THING"), Concept("C-PERSON")));
}

TEST_CASE("lexicon readings keep file order and unknown words get a fallback") {
  const auto& lex = support::toy().bundle.lexicon;
  WordUnit watch = analyze("watch", 3, lex);
  REQUIRE(watch.alternatives.size() == 2);
  CHECK(watch.alternatives[0].synt.name() == "S-NOUN");
  CHECK(watch.alternatives[1].synt.name() == "S-TR-VERB");
  CHECK(watch.span == Span{3, 4});
  CHECK(analyze("John", 0, lex).alternatives[0].sem == Concept("I-EN-JOHN"));
  WordUnit unknown = analyze("Zyzzyva", 0, lex);
  REQUIRE(unknown.alternatives.size() == 1);
  CHECK(unknown.alternatives[0].synt == unknown_word_synt());
  CHECK(unknown.alternatives[0].sem == unknown_word_sem());
  CHECK(unknown.alternatives[0].extras.at("UNKNOWN") == "TRUE");
}

TEST_CASE("segmentation peels punctuation") {
  CHECK(segment("John bought a book.") == std::vector<std::string>{"John", "bought", "a", "book", "."});
  CHECK(segment("  (yes), \"no\"!") ==
        std::vector<std::string>{"(", "yes", ")", ",", "\"", "no", "\"", "!"});
  CHECK(segment("").empty());
}

TEST_CASE("malformed resource files") {
  CHECK(code_of([] { parse_lexicon("(word \"a\")"); }) == ErrorCode::MalformedResource);
  CHECK(code_of([] { parse_lexicon("(word"); }) == ErrorCode::MalformedResource);
  CHECK(code_of([] { parse_kb("(nonsense)"); }) == ErrorCode::MalformedResource);
  CHECK(code_of([] { parse_subcat("(verb)"); }) == ErrorCode::MalformedResource);
}

TEST_CASE("subcat matching assigns roles by syntactic position and class") {
  const auto& t = support::toy();
  auto r = replay(t.corpus[0], t.bundle);
  const ParseState& s = r.states[14];
  const Frame& verb = *stack_at(s, -3);
  CHECK(subcat_match(t.bundle, verb, *stack_at(s, -4)) == "AGENT");
  CHECK(subcat_match(t.bundle, verb, *stack_at(s, -2)) == "THEME");
  CHECK(subcat_match(t.bundle, verb, *stack_at(s, -1)) == "THEME");
  // Once OBJ is filled only an animate SUBJ remains.
  Frame vp;
  vp.synt = Concept("S-VP");
  vp.sem = verb.sem;
  vp.subs = {{{"PRED"}, verb}, {{"OBJ"}, *stack_at(s, -2)}};
  refresh_derived(vp);
  CHECK(subcat_match(t.bundle, vp, *stack_at(s, -4)) == "AGENT");
  CHECK_FALSE(subcat_match(t.bundle, vp, *stack_at(s, -1)).has_value());
  CHECK_FALSE(subcat_match(t.bundle, *stack_at(s, -4), verb).has_value());
}
