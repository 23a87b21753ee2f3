#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace synchrosde {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside a function's domain (division by zero), or an
/// argument outside an operation's documented range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or incomplete model / run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Tabulation grid too coarse for the requested accuracy.
class RefinementError : public Error {
 public:
  using Error::Error;
};

/// A numerical construction violated one of its guaranteed properties.
class ConstructionError : public Error {
 public:
  ConstructionError(const std::string& what, double witness)
      : Error(what), witness_(witness) {}
  double witness() const noexcept { return witness_; }

 private:
  double witness_;
};

/// Non-finite state during time stepping.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::size_t step,
                  std::optional<std::size_t> path = std::nullopt)
      : Error(what), step_(step), path_(path) {}
  std::size_t step() const noexcept { return step_; }
  std::optional<std::size_t> path() const noexcept { return path_; }

 private:
  std::size_t step_;
  std::optional<std::size_t> path_;
};

}  // namespace synchrosde
