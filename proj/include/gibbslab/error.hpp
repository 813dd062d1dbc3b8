#pragma once

#include <stdexcept>
#include <string>

namespace gibbslab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a request exceeds an engine's state-space limit. Sizes are
// always rejected explicitly, never truncated.
struct CapacityError : Error {
  using Error::Error;
};

}  // namespace gibbslab
