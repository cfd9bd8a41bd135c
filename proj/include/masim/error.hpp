#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace masim {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text that does not conform to the formula or signature grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Malformed model document, dangling world reference, duplicate world.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on an otherwise well-formed input.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace masim
