#include "frameparse/error.hpp"

namespace frameparse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedSexpr: return "MALFORMED_SEXPR";
    case ErrorCode::InvalidSymbol: return "INVALID_SYMBOL";
    case ErrorCode::MalformedTree: return "MALFORMED_TREE";
    case ErrorCode::MalformedResource: return "MALFORMED_RESOURCE";
    case ErrorCode::UnknownConcept: return "UNKNOWN_CONCEPT";
    case ErrorCode::Cycle: return "CYCLE";
    case ErrorCode::MalformedAction: return "MALFORMED_ACTION";
    case ErrorCode::StackUnderflow: return "STACK_UNDERFLOW";
    case ErrorCode::InputExhausted: return "INPUT_EXHAUSTED";
    case ErrorCode::NoSuchAlternative: return "NO_SUCH_ALTERNATIVE";
    case ErrorCode::PathUnresolved: return "PATH_UNRESOLVED";
    case ErrorCode::PrematureDone: return "PREMATURE_DONE";
    case ErrorCode::AlreadyDone: return "ALREADY_DONE";
    case ErrorCode::NonContiguous: return "NON_CONTIGUOUS";
    case ErrorCode::IncompleteParse: return "INCOMPLETE_PARSE";
    case ErrorCode::MalformedLog: return "MALFORMED_LOG";
    case ErrorCode::MalformedFeature: return "MALFORMED_FEATURE";
    case ErrorCode::Empty: return "EMPTY";
    case ErrorCode::MalformedStructure: return "MALFORMED_STRUCTURE";
    case ErrorCode::TokenMismatch: return "TOKEN_MISMATCH";
    case ErrorCode::ConfigError: return "CONFIG_ERROR";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    std::optional<std::size_t> line,
                    std::optional<std::size_t> step) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  if (step) out += " (step " + std::to_string(*step) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(compose(code, message, line, std::nullopt)),
      code_(code),
      detail_(message),
      line_(line) {}

Error Error::with_step(std::size_t step) const {
  Error copy(code_, detail_, line_);
  static_cast<std::runtime_error&>(copy) =
      std::runtime_error(compose(code_, detail_, line_, step));
  copy.step_ = step;
  return copy;
}

}  // namespace frameparse
