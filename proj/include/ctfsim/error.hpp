#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctfsim {

enum class ErrorKind {
  InvalidArgument,
  PreconditionViolation,
  NumericFailure,
  NotSaturated,
  TargetUnreachable,
  OutOfRange,
  InconsistentInputs,
  Uncompensatable,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  // Same kind, message prefixed with the pipeline step that raised it.
  [[nodiscard]] Error with_step(std::string_view step) const {
    return Error(kind_, std::string(step) + ": " + what());
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::InvalidArgument, message);
}

}  // namespace ctfsim
