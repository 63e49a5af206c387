#include "frameparse/engine.hpp"

#include <algorithm>
#include <unordered_map>

namespace frameparse {

std::string_view to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Complete: return "COMPLETE";
    case ParseStatus::EndlessLoop: return "ENDLESS_LOOP";
    case ParseStatus::ActionError: return "ACTION_ERROR";
  }
  return "?";
}

std::size_t step_budget(const Limits& limits, std::size_t token_count) {
  if (limits.max_steps > 0) return limits.max_steps;
  return std::max<std::size_t>(200, 20 * token_count);
}

ParseOutcome parse(std::string_view sentence, const Structure& structure, const FeatureSet& features,
                   const ResourceBundle& bundle, const Limits& limits) {
  ParseOutcome out;
  ParseState state = initial_state(sentence, bundle.lexicon);
  const std::size_t budget = step_budget(limits, state.token_count());
  std::unordered_map<std::size_t, std::vector<ParseState>> seen;
  auto remember = [&](const ParseState& s) {
    auto& bucket = seen[configuration_hash(s)];
    for (const auto& prior : bucket)
      if (same_configuration(prior, s)) return false;
    bucket.push_back(s);
    return true;
  };
  if (limits.detect_state_repeat) remember(state);

  for (;;) {
    if (out.steps >= budget) {
      out.status = ParseStatus::EndlessLoop;
      out.message = "step budget of " + std::to_string(budget) + " exhausted";
      break;
    }
    std::string text = classify_action(structure, eval_vector(state, features, bundle));
    out.actions.push_back(text);
    try {
      state = apply_action(state, parse_action(text));
    } catch (const Error& e) {
      out.status = ParseStatus::ActionError;
      out.error = e.code();
      out.message = e.what();
      break;
    }
    ++out.steps;
    if (state.finished) {
      out.status = ParseStatus::Complete;
      out.tree = state.stack.back();
      break;
    }
    if (limits.detect_state_repeat && !remember(state)) {
      out.status = ParseStatus::EndlessLoop;
      out.message = "parse state repeated after step " + std::to_string(out.steps);
      break;
    }
  }
  out.final_state = std::move(state);
  return out;
}

std::size_t AssistedOutcome::matches() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < predicted.size() && i < logged.size(); ++i) n += predicted[i] == logged[i];
  return n;
}

AssistedOutcome assisted_parse(const ActionLog& log, const Structure& structure, const FeatureSet& features,
                               const ResourceBundle& bundle, const Limits& limits) {
  AssistedOutcome out;
  auto replayed = replay(log, bundle);
  out.logged = log.actions;
  out.predicted.reserve(log.actions.size());
  for (const auto& state : replayed.states)
    out.predicted.push_back(classify_action(structure, eval_vector(state, features, bundle)));
  out.free = parse(log.sentence, structure, features, bundle, limits);
  return out;
}

}  // namespace frameparse
