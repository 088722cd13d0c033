#pragma once

#include <stdexcept>
#include <string>

namespace cpr {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (bad JSON, wrong shapes, unknown keys).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A multi-step construction failed at a named step.
class PipelineError : public Error {
 public:
  PipelineError(std::string step, const std::string& what)
      : Error(step + ": " + what), step_(std::move(step)) {}

  const std::string& step() const noexcept { return step_; }

 private:
  std::string step_;
};

/// Raised when a numerical invariant that should hold by construction fails.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cpr
