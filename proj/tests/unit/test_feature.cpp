#include "doctest.h"

#include "support.hpp"

#include "frameparse/error.hpp"

using namespace frameparse;

namespace {

FeatureValue eval(const ParseState& s, std::string_view text) {
  return eval_feature(s, parse_feature(text), support::toy().bundle);
}

// Example state: NP V NP on the stack, "today ." left on the input.
const ParseState& example_state() {
  static const ParseState s = replay(support::toy().corpus[0], support::toy().bundle).states[11];
  return s;
}

}  // namespace

TEST_CASE("feature texts round trip") {
  for (const char* text : {"(SYNT OF -1)", "(SYNT OF OBJ OF -1 AT S-SYNT-ELEM)", "(SEM OF PRED OF -2 AT C-THING)",
                           "(SYNT OF (ALT S-VERB) OF 1)", "(LEX OF 2)", "(SURF OF -3)", "(TENSE OF -1)",
                           "(NUMBER OF SUBJ OF -1)", "(PERSON OF 1)", "(EXISTS OBJ OF -1)", "(EXISTS -4)",
                           "(AGREEMENT -2 -1)", "(SEMROLE -1 -2)", "(SYNT OF PRED OF (ALT S-NOUN) OF -1)"}) {
    CHECK(to_text(parse_feature(text)) == text);
    CHECK(parse_feature(to_text(parse_feature(text))) == parse_feature(text));
  }
  CHECK(to_text(parse_feature("(synt of obj of -1 at s-synt-elem)")) == "(SYNT OF OBJ OF -1 AT S-SYNT-ELEM)");
  CHECK(to_text(parse_feature("(SYNT OF +1)")) == "(SYNT OF 1)");
}

TEST_CASE("malformed features") {
  for (const char* bad : {"", "SYNT", "(SYNT -1)", "(SYNT OF)", "(SYNT OF OBJ)", "(SYNT OF 0)", "(LEX OF -1 AT S-NP)",
                          "(SYNT OF -1 AT)", "(SYNT OF -1 EXTRA)", "(FOO OF -1)", "(EXISTS)", "(AGREEMENT -1)",
                          "(SEMROLE a b)", "(SYNT OF (ALT S-VERB) -1)", "(SYNT OF (ALT S-VERB) OF OBJ OF -1)",
                          "(EXISTS (ALT S-VERB) OF -1)", "(SYNT OF -1 AT s-np x)"}) {
    try {
      parse_feature(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedFeature);
    }
  }
}

TEST_CASE("feature sets reject duplicates and report lines") {
  CHECK(FeatureSet::parse("; c\n(SYNT OF -1)\n\n(SYNT OF 1) ; tail\n").size() == 2);
  CHECK_THROWS_AS(FeatureSet::parse("(SYNT OF -1)\n(synt of -1)\n"), Error);
  try {
    FeatureSet::parse("(SYNT OF -1)\n(BAD)\n");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("selectors on the example state") {
  const ParseState& s = example_state();
  CHECK(eval(s, "(SYNT OF -1)") == "S-NP");
  CHECK(eval(s, "(SYNT OF -2)") == "S-TR-VERB");
  CHECK(eval(s, "(SYNT OF -2 AT S-SYNT-ELEM)") == "S-VERB");
  CHECK(eval(s, "(SEM OF -3)") == "I-EN-JOHN");
  CHECK(eval(s, "(SEM OF -3 AT C-THING)") == "C-ENTITY");
  CHECK(eval(s, "(LEX OF -2)") == "buy");
  CHECK(eval(s, "(SURF OF -2)") == "bought");
  CHECK(eval(s, "(TENSE OF -2)") == "past_tense");
  CHECK(eval(s, "(NUMBER OF -3)") == "SING");
  CHECK(eval(s, "(PERSON OF -3)") == "3");
  CHECK(eval(s, "(SYNT OF 1)") == "S-ADV");
  CHECK(eval(s, "(SYNT OF 2)") == "D-PERIOD");
  CHECK(eval(s, "(SYNT OF 3)") == kUnavailable);
  CHECK(eval(s, "(SYNT OF -4)") == kUnavailable);
  CHECK(eval(s, "(SYNT OF PRED OF -1)") == "S-NOUN");
  CHECK(eval(s, "(SYNT OF MOD OF PRED OF -1)") == "S-NOUN");
  CHECK(eval(s, "(SYNT OF OBJ OF -1)") == kUnavailable);
  CHECK(eval(s, "(TENSE OF -1)") == kUnavailable);
  CHECK(eval(s, "(SEM OF DET OF -1)") == kUnavailable);
}

TEST_CASE("EXISTS distinguishes a missing anchor from a missing role") {
  const ParseState& s = example_state();
  CHECK(eval(s, "(EXISTS DET OF -1)") == kTrue);
  CHECK(eval(s, "(EXISTS OBJ OF -1)") == kFalse);
  CHECK(eval(s, "(EXISTS -3)") == kTrue);
  CHECK(eval(s, "(EXISTS -4)") == kUnavailable);
  CHECK(eval(s, "(EXISTS OBJ OF -4)") == kUnavailable);
}

TEST_CASE("ALT picks the first satisfying reading") {
  const auto& lex = support::toy().bundle.lexicon;
  ParseState s = initial_state("watch", lex);
  CHECK(eval(s, "(SYNT OF 1)") == "S-NOUN");
  CHECK(eval(s, "(SYNT OF (ALT S-VERB) OF 1)") == "S-TR-VERB");
  CHECK(eval(s, "(SYNT OF (ALT S-ADJ) OF 1)") == kUnavailable);
  ParseState pushed = apply_action(s, parse_action("(S)"));
  CHECK(eval(pushed, "(SYNT OF (ALT S-NOUN) OF -1)") == "S-NOUN");
  CHECK(eval(pushed, "(SYNT OF (ALT S-VERB) OF -1)") == kUnavailable);
}

TEST_CASE("agreement and semantic roles") {
  const auto& lex = support::toy().bundle.lexicon;
  ParseState s = initial_state("they sings", lex);
  s = apply_action(apply_action(s, parse_action("(S)")), parse_action("(S)"));
  CHECK(eval(s, "(AGREEMENT -2 -1)") == kFalse);
  ParseState ok = apply_action(apply_action(initial_state("John sings", lex), parse_action("(S)")),
                               parse_action("(S)"));
  CHECK(eval(ok, "(AGREEMENT -2 -1)") == kTrue);
  CHECK(eval(ok, "(AGREEMENT -3 -1)") == kUnavailable);
  const ParseState& f = example_state();
  CHECK(eval(f, "(SEMROLE -3 -2)") == "AGENT");
  CHECK(eval(f, "(SEMROLE -1 -2)") == "THEME");
  CHECK(eval(f, "(SEMROLE -2 -1)") == kUnavailable);
  CHECK(eval(f, "(SEMROLE -1 -5)") == kUnavailable);
}

TEST_CASE("evaluation is total on random states") {
  const auto& t = support::toy();
  std::mt19937 rng(9);
  for (const auto& log : t.corpus) {
    auto r = replay(log, t.bundle);
    for (const auto& st : r.states) {
      auto v = eval_vector(st, t.features, t.bundle);
      CHECK(v.size() == t.features.size());
      for (const auto& x : v) CHECK_FALSE(x.empty());
    }
  }
  ParseState empty;
  for (const auto& v : eval_vector(empty, t.features, t.bundle)) CHECK(v == kUnavailable);
}

TEST_CASE("example extraction, conflicts and TSV round trip") {
  const auto& t = support::toy();
  auto ex = extract_examples(t.corpus, t.features, t.bundle);
  std::size_t total = 0;
  for (const auto& log : t.corpus) total += log.actions.size();
  CHECK(ex.size() == total);
  CHECK(find_conflicts(ex).empty());
  auto back = parse_examples(format_examples(t.features, ex), t.features.size());
  REQUIRE(back.size() == ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    CHECK(back[i].values == ex[i].values);
    CHECK(back[i].action == ex[i].action);
  }
  std::vector<ParseExample> clash{ex[0], ex[0], ex[0]};
  clash[1].action = "(DONE)";
  clash[2].action = "(S-BACK)";
  auto c = find_conflicts(clash);
  CHECK(c.size() == 2);
  for (auto [i, j] : c) CHECK(i < j);
  CHECK_THROWS_AS(parse_examples("h\nA\tB\n", 3), Error);
}
