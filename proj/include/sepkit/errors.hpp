#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sepkit {

// Root of every exception thrown by the library.  Callers that only care
// about "something went wrong" catch this; the CLI maps subclasses to exit
// statuses.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input text.  `position` is a byte offset into the parsed string.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at offset " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

// A DomainConfig that violates its invariants, or an input mentioning a
// name/value the configuration does not know.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// An assertion or heap that is illegal for the configured memory model
// (e.g. a deallocated cell under model 1).
class ModelMismatch : public Error {
  public:
    using Error::Error;
};

class NotDisjoint : public Error {
  public:
    using Error::Error;
};

class NotUniversalFrame : public Error {
  public:
    using Error::Error;
};

class KindMismatch : public Error {
  public:
    using Error::Error;
};

class UnknownRule : public Error {
  public:
    using Error::Error;
};

} // namespace sepkit
