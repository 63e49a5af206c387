#pragma once

// Deterministic parsing driven by a learned decision structure.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frameparse/action.hpp"
#include "frameparse/error.hpp"
#include "frameparse/feature.hpp"
#include "frameparse/learner.hpp"

namespace frameparse {

enum class ParseStatus { Complete, EndlessLoop, ActionError };

std::string_view to_string(ParseStatus s);

struct Limits {
  std::size_t max_steps = 0;  // 0: max(200, 20 * tokens)
  bool detect_state_repeat = true;
};

std::size_t step_budget(const Limits& limits, std::size_t token_count);

struct ParseOutcome {
  ParseStatus status = ParseStatus::ActionError;
  std::optional<Frame> tree;
  std::vector<std::string> actions;  // every action attempted, the failing one last
  std::size_t steps = 0;             // actions successfully applied
  ParseState final_state;
  std::optional<ErrorCode> error;
  std::string message;
};

ParseOutcome parse(std::string_view sentence, const Structure& structure, const FeatureSet& features,
                   const ResourceBundle& bundle, const Limits& limits = {});

struct AssistedOutcome {
  std::vector<std::string> predicted;
  std::vector<std::string> logged;
  ParseOutcome free;

  std::size_t matches() const;
};

// Throws the replay error when the log itself does not replay.
AssistedOutcome assisted_parse(const ActionLog& log, const Structure& structure, const FeatureSet& features,
                               const ResourceBundle& bundle, const Limits& limits = {});

}  // namespace frameparse
