#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynpov {

/// Machine-readable failure categories. The CLI reports these names verbatim.
enum class ErrorKind {
  InvalidArgument,
  NonDiagonalizable,
  NotEmbeddable,
  NotIrreducible,
  NegativeVariance,
  UnsupportedOrder,
  NoPoorMass,
  ZeroPoorIncome,
  NoPoor,
  ZeroIncomeMass,
  NegativeIncome,
  IncompletePath,
  EmptyRow,
  InsufficientClassData,
  InvalidWindow,
  ParseError,
  MissingThreshold,
  MissingInput,
  EmptyCohort,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dynpov
