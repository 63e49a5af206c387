#include "doctest.h"

#include "support.hpp"

#include "frameparse/engine.hpp"
#include "frameparse/error.hpp"

using namespace frameparse;

namespace {

const Model& toy_model(Variant v) {
  static std::map<Variant, Model> cache;
  auto it = cache.find(v);
  if (it != cache.end()) return it->second;
  const auto& t = support::toy();
  return cache.emplace(v, train_model(v, t.features, extract_examples(t.corpus, t.features, t.bundle), t.groups))
      .first->second;
}

DecisionTree constant(const std::string& action) {
  DecisionTree t;
  t.action = action;
  t.support = 1;
  t.distribution = {{action, 1}};
  return t;
}

}  // namespace

TEST_CASE("step budget") {
  CHECK(step_budget({}, 3) == 200);
  CHECK(step_budget({}, 20) == 400);
  CHECK(step_budget(Limits{7, true}, 20) == 7);
}

TEST_CASE("trained models reproduce every gold tree") {
  const auto& t = support::toy();
  for (Variant v : {Variant::Tree, Variant::List, Variant::Hier, Variant::Hybrid}) {
    const Model& m = toy_model(v);
    for (const auto& log : t.corpus) {
      ParseOutcome out = parse(log.sentence, m.structure, t.features, t.bundle);
      REQUIRE_MESSAGE(out.status == ParseStatus::Complete, log.sentence << " under " << to_string(v));
      CHECK(*out.tree == *log.gold_tree);
      CHECK(out.actions == log.actions);
      CHECK(out.steps == log.actions.size());
      CHECK(out.final_state.finished);
    }
  }
}

TEST_CASE("a shift/shift-back cycle is caught by state repetition") {
  const auto& t = support::toy();
  FeatureSet fs = FeatureSet::parse("(EXISTS -1)\n");
  ParseOutcome out = parse("John bought a book.", support::cyclic_structure(), fs, t.bundle);
  CHECK(out.status == ParseStatus::EndlessLoop);
  // S, S-BACK (the word unit comes back as a committed frame), S repeats step 1.
  CHECK(out.steps == 3);
  CHECK(out.message.find("repeated") != std::string::npos);
}

TEST_CASE("without repeat detection the budget ends the parse") {
  const auto& t = support::toy();
  FeatureSet fs = FeatureSet::parse("(EXISTS -1)\n");
  ParseOutcome out = parse("John bought a book.", support::cyclic_structure(), fs, t.bundle, Limits{0, false});
  CHECK(out.status == ParseStatus::EndlessLoop);
  CHECK(out.steps == 200);
  ParseOutcome one = parse("John bought a book.", support::cyclic_structure(), fs, t.bundle, Limits{1, true});
  CHECK(one.status == ParseStatus::EndlessLoop);
  CHECK(one.steps == 1);
  CHECK(one.actions.size() == 1);
}

TEST_CASE("an inapplicable action ends the parse with its error") {
  const auto& t = support::toy();
  ParseOutcome out = parse("John slept.", constant("(DONE)"), t.features, t.bundle);
  CHECK(out.status == ParseStatus::ActionError);
  CHECK(out.error == ErrorCode::PrematureDone);
  CHECK(out.steps == 0);
  CHECK(out.actions == std::vector<std::string>{"(DONE)"});
  ParseOutcome garbage = parse("John slept.", constant("(BOGUS)"), t.features, t.bundle);
  CHECK(garbage.error == ErrorCode::MalformedAction);
  ParseOutcome shifts = parse("John slept.", constant("(S)"), t.features, t.bundle);
  CHECK(shifts.error == ErrorCode::InputExhausted);
  CHECK(shifts.steps == 3);
}

TEST_CASE("assisted parsing predicts from the logged states") {
  const auto& t = support::toy();
  const auto& log = t.corpus[0];
  AssistedOutcome a = assisted_parse(log, toy_model(Variant::Hybrid).structure, t.features, t.bundle);
  CHECK(a.logged == log.actions);
  CHECK(a.predicted == log.actions);
  CHECK(a.matches() == log.actions.size());
  CHECK(a.free.status == ParseStatus::Complete);

  AssistedOutcome dumb = assisted_parse(log, constant("(S)"), t.features, t.bundle);
  std::size_t shifts = std::count(log.actions.begin(), log.actions.end(), "(S)");
  CHECK(dumb.matches() == shifts);
  CHECK(dumb.free.status == ParseStatus::ActionError);

  ActionLog broken{"John slept.", {"(DONE)"}, std::nullopt};
  CHECK_THROWS_AS(assisted_parse(broken, constant("(S)"), t.features, t.bundle), Error);
}

TEST_CASE("novel sentences parse or fail cleanly") {
  const auto& t = support::toy();
  const Model& m = toy_model(Variant::Hybrid);
  for (const char* s : {"Mary saw the red apple.", "the boy likes the old book today.", "Zork glorped.", "", "."}) {
    ParseOutcome out = parse(s, m.structure, t.features, t.bundle);
    CHECK(out.steps <= step_budget({}, segment(s).size()));
    if (out.status == ParseStatus::Complete) {
      CHECK_FALSE(check_frame(*out.tree).has_value());
    }
  }
}
