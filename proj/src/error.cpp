#include "dynpov/error.hpp"

namespace dynpov {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonDiagonalizable: return "NonDiagonalizable";
    case ErrorKind::NotEmbeddable: return "NotEmbeddable";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::NegativeVariance: return "NegativeVariance";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::NoPoorMass: return "NoPoorMass";
    case ErrorKind::ZeroPoorIncome: return "ZeroPoorIncome";
    case ErrorKind::NoPoor: return "NoPoor";
    case ErrorKind::ZeroIncomeMass: return "ZeroIncomeMass";
    case ErrorKind::NegativeIncome: return "NegativeIncome";
    case ErrorKind::IncompletePath: return "IncompletePath";
    case ErrorKind::EmptyRow: return "EmptyRow";
    case ErrorKind::InsufficientClassData: return "InsufficientClassData";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingThreshold: return "MissingThreshold";
    case ErrorKind::MissingInput: return "MissingInput";
    case ErrorKind::EmptyCohort: return "EmptyCohort";
  }
  return "Unknown";
}

}  // namespace dynpov
