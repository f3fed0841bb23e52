#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ultraprod {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `position()` is a byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at offset " + std::to_string(position)),
        detail_(message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }
  /// The message without the offset suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t position_;
};

/// A quantifier sweep or total evaluation budget would be exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Arguments outside an operation's domain: non-prime index, family
/// mismatch, a rule that leaves the representable fragment, and so on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An assumed arithmetic fact could not be witnessed below the search bound.
class AxiomWitnessFailure : public Error {
 public:
  using Error::Error;
};

/// An exact classifier disagreed with brute-force evaluation. Always a bug.
class ClassifierMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace ultraprod
