#pragma once

#include <stdexcept>
#include <string>

namespace signsep {

/// Base class for every error raised by the library. The CLI maps the
/// category of the error to a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SIGNSEP_DEFINE_ERROR(Name, Base)          \
  class Name : public Base {                      \
   public:                                        \
    using Base::Base;                             \
  }

// Input/contract violations (exit code 2 at the CLI).
SIGNSEP_DEFINE_ERROR(InvalidInputError, Error);
SIGNSEP_DEFINE_ERROR(DimensionError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(NonFiniteError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(SimplexError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(ConfigError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(EmptyClipError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(EmptyListError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(AdjacentDuplicateLabelError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(HandCountMismatchError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(InsufficientSamplesError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(OutOfRangeError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(DimensionMismatchError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(EmptyClassError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(EmptySetError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(NoAcceptError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(MissingGroundTruthError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(InsufficientHeldOutError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(SeparationFailureError, InvalidInputError);
SIGNSEP_DEFINE_ERROR(ParseError, InvalidInputError);

// File system and container errors (exit code 3).
SIGNSEP_DEFINE_ERROR(IoError, Error);
SIGNSEP_DEFINE_ERROR(VersionError, IoError);
SIGNSEP_DEFINE_ERROR(CorruptModelError, IoError);

// Training (exit code 4).
SIGNSEP_DEFINE_ERROR(DivergenceError, Error);

// Decoding (exit code 5).
SIGNSEP_DEFINE_ERROR(StreamTooShortError, Error);

#undef SIGNSEP_DEFINE_ERROR

}  // namespace signsep
