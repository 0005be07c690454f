#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contextdb {

enum class ErrorCode {
  SyntaxError,
  UnknownEdge,
  UnknownNode,
  AmbiguousEdge,
  TypeError,
  KeyMismatch,
  OpNotApplicable,
  NotTreeQuery,
  NotAssociative,
  NotApplicable,
  PredicateTypeError,
  EqualityViolation,
  NotRefined,
  DivisionByZero,
  DomainMismatch,
  KeyViolation,
  UnbackedEdge,
  UnsupportedForSql,
  NoMatch,
  RootCollision,
  NoCandidateKey,
  ViewError,
  DomainConflict,
  EvalError,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Engine error. `details` carries structured payload entries (witness keys,
/// offending node names, ...) that the service layer forwards verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message,
        std::vector<std::pair<std::string, std::string>> details = {})
      : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::pair<std::string, std::string>>& details() const noexcept {
    return details_;
  }

 private:
  ErrorCode code_;
  std::vector<std::pair<std::string, std::string>> details_;
};

}  // namespace contextdb
