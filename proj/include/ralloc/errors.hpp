#pragma once

#include <stdexcept>
#include <string>

namespace ralloc {

// every failure the library reports derives from this
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define RALLOC_DEFINE_ERROR(Name)                                   \
  struct Name : Error {                                             \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  };

RALLOC_DEFINE_ERROR(InvalidArgument)
RALLOC_DEFINE_ERROR(NoEdges)
RALLOC_DEFINE_ERROR(Unsupported)
RALLOC_DEFINE_ERROR(UnsupportedMode)
RALLOC_DEFINE_ERROR(PolicyProtocolViolation)
RALLOC_DEFINE_ERROR(ElementNotInSet)
RALLOC_DEFINE_ERROR(TargetTooLarge)
RALLOC_DEFINE_ERROR(TooLarge)
RALLOC_DEFINE_ERROR(ParseError)

#undef RALLOC_DEFINE_ERROR

}  // namespace ralloc
