#pragma once

#include <stdexcept>
#include <string>

namespace influence {

// Every failure mode the library reports, so callers (and tests) can
// dispatch on the kind instead of parsing messages.
enum class ErrorKind {
  NegativeEntry,
  RowSumViolation,
  NoConvergence,
  ZeroExpertise,
  DegeneratePerception,
  EmptyHistory,
  TeamTooSmall,
  DimensionMismatch,
  IsolatedRater,
  SchemaError,
  ValidationError,
  MissingFeature,
  Infeasible,
  RankDeficient,
  DegenerateSeries,
  SeriesTooShort,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace influence
