#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace forge {

// Root of every error raised by the library. The CLI maps these to exit
// code 1; usage errors are handled separately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

#define FORGE_DEFINE_ERROR(Name)     \
  class Name : public Error {        \
   public:                           \
    using Error::Error;              \
  }

FORGE_DEFINE_ERROR(ValidationError);
FORGE_DEFINE_ERROR(IdentityError);
FORGE_DEFINE_ERROR(RangeError);
FORGE_DEFINE_ERROR(ConfigError);
FORGE_DEFINE_ERROR(UnsampleableError);
FORGE_DEFINE_ERROR(ConsistencyError);
FORGE_DEFINE_ERROR(CoverageError);
FORGE_DEFINE_ERROR(LexiconError);
FORGE_DEFINE_ERROR(DanglingReferenceError);
FORGE_DEFINE_ERROR(IntegrityError);
FORGE_DEFINE_ERROR(ShapeError);

#undef FORGE_DEFINE_ERROR

}  // namespace forge
