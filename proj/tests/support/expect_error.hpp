#pragma once

#include <optional>

#include "dynpov/error.hpp"

namespace dynpov::testing {

/// Kind of the dynpov::Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace dynpov::testing
