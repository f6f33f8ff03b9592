#pragma once

#include <stdexcept>
#include <string>

namespace kirchpass {

/// Base class for all failures raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent run configuration (bad JSON, missing keys,
/// out-of-range values, structural problems such as non-increasing zeros).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace kirchpass
