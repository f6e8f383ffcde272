#pragma once

#include <stdexcept>
#include <string>

namespace costreg {

/// Invalid configuration: shape mismatches, unknown keys, malformed values.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A NaN or infinity escaped into a computation that requires finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or incompatible on-disk artifact (bad magic, version, layout).
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal contract, e.g. a forward cache replayed against the wrong network.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace costreg
