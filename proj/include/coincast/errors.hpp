#pragma once

#include <stdexcept>
#include <string>

namespace coincast {

/// Broad failure class, used by the CLI to pick an exit code.
enum class ErrorClass {
  Argument = 1,   // bad spec, flag, or precondition
  Data = 2,       // unreadable or inconsistent input data
  Invariant = 3,  // internal consistency check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& what) : Error(ErrorClass::Argument, what) {}
};

struct SpecError : Error {
  explicit SpecError(const std::string& what) : Error(ErrorClass::Argument, what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct DuplicateDateError : Error {
  explicit DuplicateDateError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct InconsistentCandleError : Error {
  explicit InconsistentCandleError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct EmptySliceError : Error {
  explicit EmptySliceError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

/// Raised when a division by a zero actual/base value would occur.
struct DivisionGuardError : Error {
  explicit DivisionGuardError(const std::string& what) : Error(ErrorClass::Data, what) {}
};

struct InvariantError : Error {
  explicit InvariantError(const std::string& what) : Error(ErrorClass::Invariant, what) {}
};

}  // namespace coincast
