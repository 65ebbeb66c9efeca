#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace priordis {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

// A word, verb, or phrase that the bound resources do not know.
class LookupError : public Error {
 public:
  using Error::Error;
};

// compose() under holistic lookup found no stored vector for the phrase.
class HolisticMissError : public LookupError {
 public:
  using LookupError::LookupError;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

// Correlation or test statistic that is not defined for the given input.
class UndefinedStatisticError : public Error {
 public:
  using Error::Error;
};

}  // namespace priordis
