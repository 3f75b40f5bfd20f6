#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsc {

// Base of every error raised by the library. Callers that only need to
// report the failure can catch this; the subclasses exist so tests and the
// CLI can tell a bad parameter from a malformed file.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ModeError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class CollisionError : public Error {
 public:
  CollisionError(const std::string& what, std::uint64_t count)
      : Error(what), count_(count) {}
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_;
};

// Malformed external input. `location` is a 1-based line number for text
// formats and a byte offset for binary ones.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t location)
      : Error(what), location_(location) {}
  std::uint64_t location() const { return location_; }

 private:
  std::uint64_t location_;
};

}  // namespace hsc
