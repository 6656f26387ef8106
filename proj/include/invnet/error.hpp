#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invnet {

// Base for every error raised by the library. Subclasses map onto the CLI
// exit codes (config 2, numeric 3, singularity 4, corrupt artifact 5).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t got)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class CorruptArtifactError : public Error {
 public:
  using Error::Error;
};

// Raised when a ForwardTrace does not belong to the net it is replayed on.
class TraceError : public Error {
 public:
  using Error::Error;
};

}  // namespace invnet
