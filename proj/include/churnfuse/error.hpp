#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace churnfuse {

enum class ErrorCode {
  SchemaMismatch,
  ValueError,
  DuplicateId,
  UnknownLabel,
  InvalidConfig,
  InvalidDuration,
  ClipTooShort,
  BadFrameParams,
  BadKernel,
  BadBand,
  DegenerateData,
  ShapeMismatch,
  TooFewExamples,
  TargetOutOfRange,
  EmptyLabeledSet,
  DimensionMismatch,
  SingleClass,
  BadK,
  TooFewMinority,
  InvalidTriple,
  MissingModality,
  NoRelevant,
  EmptyQuerySet,
  LengthMismatch,
  DegenerateColumn,
  BadFormat,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI) can branch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace churnfuse
