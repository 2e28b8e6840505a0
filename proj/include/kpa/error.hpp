#pragma once

#include <stdexcept>
#include <string>

namespace kpa {

enum class ErrorKind {
  Io,
  Parse,
  Reference,
  Duplicate,
  Range,
  Precondition,
  MissingPrediction,
  Transport,
  Unparseable,
};

const char* to_string(ErrorKind kind);

/// Base error for every failure raised by the library. The message is
/// prefixed with the kind so that CLI output stays greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the pipeline; wraps a module error with the stage it came from.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)), message_(message) {}

  const std::string& stage() const noexcept { return stage_; }
  /// The message without the stage prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string stage_;
  std::string message_;
};

}  // namespace kpa
