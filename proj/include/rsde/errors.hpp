#pragma once

#include <stdexcept>
#include <string>

namespace rsde {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// x violates a half-space constraint beyond tolerance.
struct DomainViolation : Error {
  using Error::Error;
};

// <d_i(alpha), n_i> <= 0, so the direction cannot be normalized.
struct DegenerateDirection : Error {
  using Error::Error;
};

// Active directions of the constraint solver are linearly dependent.
struct SingularActiveSystem : Error {
  using Error::Error;
};

// Active-set iteration exceeded its cap.
struct NoConvergence : Error {
  using Error::Error;
};

// A*D singular when building a derivative projection (W-set encounter).
struct SingularSystem : Error {
  using Error::Error;
};

struct EnumerationOverflow : Error {
  using Error::Error;
};

struct OutOfBox : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct PreflightRefusal : Error {
  using Error::Error;
};

}  // namespace rsde
