#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace frameparse {

enum class ErrorCode {
  MalformedSexpr,
  InvalidSymbol,
  MalformedTree,
  MalformedResource,
  UnknownConcept,
  Cycle,
  MalformedAction,
  StackUnderflow,
  InputExhausted,
  NoSuchAlternative,
  PathUnresolved,
  PrematureDone,
  AlreadyDone,
  NonContiguous,
  IncompleteParse,
  MalformedLog,
  MalformedFeature,
  Empty,
  MalformedStructure,
  TokenMismatch,
  ConfigError,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // 1-based line for text-format errors.
  std::optional<std::size_t> line() const noexcept { return line_; }
  // 0-based action index for replay errors.
  std::optional<std::size_t> step() const noexcept { return step_; }
  const std::string& detail() const noexcept { return detail_; }

  Error with_step(std::size_t step) const;

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> line_;
  std::optional<std::size_t> step_;
};

}  // namespace frameparse
